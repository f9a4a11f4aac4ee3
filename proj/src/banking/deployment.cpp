// Copyright 2026 The LoKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>

#include "lokit/banking.hpp"

namespace lokit::banking {

using toolkit::CorrelationId;
using toolkit::Decision;
using toolkit::Reply;

namespace {

const std::set<std::string>& write_functors() {
  static const std::set<std::string> names{"deposit", "withdraw", "transfer-in", "transfer-out",
                                           "create",  "delete",   "undo"};
  return names;
}

bool is_err(const Term& t, std::string_view reason = {}) {
  if (!t.is_compound() || t.text() != "err" || t.arity() != 1) return false;
  return reason.empty() || (t.arg(0).is_atom() && t.arg(0).text() == reason);
}

std::size_t distinct_servers(std::span<const Reply> replies) {
  std::set<std::string> servers;
  for (const Reply& r : replies) servers.insert(r.server);
  return servers.size();
}

Outcome classify(std::span<const Reply> replies, std::size_t n) {
  bool refused = false;
  for (const Reply& r : replies) {
    if (is_err(r.result, "overdraft")) return Outcome::aborted_overdraft;
    refused = refused || is_err(r.result);
  }
  if (refused) return Outcome::aborted;
  return toolkit::majority_policy(n, replies) == Decision::commit ? Outcome::committed : Outcome::aborted;
}

// Some replica may have applied the write: it acknowledged, or it has not answered yet.
bool needs_undo(std::span<const Reply> replies, std::size_t n) {
  if (distinct_servers(replies) < n) return true;
  return std::any_of(replies.begin(), replies.end(), [](const Reply& r) { return !is_err(r.result); });
}

Term op3(std::string_view f, const Term& b, const Term& a, const Term& am) { return Term::compound(f, {b, a, am}); }

}  // namespace

struct Deployment::ClientState {
  enum class Phase { idle, write, leg1, leg2, undo_leg2, undo, lookup };

  std::string name;
  AgentId agent;
  std::deque<Term> queue;
  Phase phase = Phase::idle;
  std::size_t record = 0;
  Term request;
  Outcome pending = Outcome::pending;
  std::optional<CorrelationId> leg1;
  std::vector<Term> lookups;
  std::size_t lookup_index = 0;
  std::set<CorrelationId> finished;
  std::map<CorrelationId, std::string> first_server;
};

struct Deployment::Driver {
  Deployment& d;
  std::map<std::string, ClientState> clients;

  explicit Driver(Deployment& owner) : d(owner) {}

  std::size_t replica_count(const Term& bank) const {
    auto it = d.replica_counts_.find(bank.text());
    return it == d.replica_counts_.end() ? 0 : it->second;
  }

  void issue(ClientState& c, const Term& params) {
    d.sim_.inject(c.agent, Term::compound("trigger", {params}));
  }

  void finish(ClientState& c, Outcome outcome) {
    OpRecord& rec = d.records_[c.record];
    rec.outcome = outcome;
    rec.finished = d.sim_.now();
    c.phase = ClientState::Phase::idle;
    c.leg1.reset();
    start_next(c);
  }

  void start_next(ClientState& c) {
    while (c.phase == ClientState::Phase::idle && !c.queue.empty()) {
      Term t = c.queue.front();
      c.queue.pop_front();
      const std::string& f = t.text();
      if (f == "suspend" || f == "resume") {
        fault(t);
        continue;
      }
      c.record = d.records_.size();
      d.records_.push_back(OpRecord{c.name, t, Outcome::pending, d.sim_.now(), d.sim_.now(), {}, 0, 0});
      c.request = t;
      begin(c, t);
    }
  }

  void fault(const Term& t) {
    try {
      if (t.text() == "suspend") {
        d.sim_.suspend(t.arg(0).text());
      } else {
        d.sim_.resume(t.arg(0).text());
      }
    } catch (const simnet::SimError&) {
      // Unknown or terminated agent: nothing to suspend.
    }
  }

  void begin(ClientState& c, const Term& t) {
    const std::string& f = t.text();
    if (f == "look-up") {
      c.lookups.clear();
      c.lookup_index = 0;
      if (t.arity() == 0) {
        for (const BankSpec& b : d.config_.banks) c.lookups.push_back(Term::compound("look-up", {Term::atom(b.name)}));
      } else if (replica_count(t.arg(0)) > 0) {
        c.lookups.push_back(t);
      }
      if (c.lookups.empty()) return finish(c, Outcome::read);
      c.phase = ClientState::Phase::lookup;
      return issue(c, c.lookups.front());
    }
    if (replica_count(t.arg(0)) == 0) return finish(c, Outcome::aborted);
    if (f == "transfer") {
      if (replica_count(t.arg(3)) == 0) return finish(c, Outcome::aborted);
      c.phase = ClientState::Phase::leg1;
      return issue(c, op3("transfer-out", t.arg(0), t.arg(1), t.arg(2)));
    }
    c.phase = ClientState::Phase::write;
    issue(c, t);
  }

  void undo(ClientState& c, ClientState::Phase next, const Term& bank, const CorrelationId& id) {
    c.phase = next;
    issue(c, Term::compound("undo", {bank, id.to_term()}));
  }

  void on_policy(const std::string& client, const CorrelationId& id, std::span<const Reply> replies) {
    auto it = clients.find(client);
    if (it == clients.end()) return;
    ClientState& c = it->second;
    if (c.phase == ClientState::Phase::idle || !c.finished.insert(id).second) return;
    OpRecord& rec = d.records_[c.record];
    const Term& req = c.request;
    using Phase = ClientState::Phase;

    switch (c.phase) {
      case Phase::lookup:
        if (++c.lookup_index < c.lookups.size()) return issue(c, c.lookups[c.lookup_index]);
        return finish(c, Outcome::read);
      case Phase::write: {
        std::size_t n = replica_count(req.arg(0));
        Outcome o = classify(replies, n);
        if (o == Outcome::committed || !needs_undo(replies, n)) return finish(c, o);
        c.pending = o;
        return undo(c, Phase::undo, req.arg(0), id);
      }
      case Phase::leg1: {
        std::size_t n = replica_count(req.arg(0));
        Outcome o = classify(replies, n);
        if (o == Outcome::committed) {
          c.leg1 = id;
          c.phase = Phase::leg2;
          return issue(c, op3("transfer-in", req.arg(3), req.arg(4), req.arg(2)));
        }
        if (!needs_undo(replies, n)) return finish(c, o);
        c.pending = o;
        return undo(c, Phase::undo, req.arg(0), id);
      }
      case Phase::leg2: {
        std::size_t n = replica_count(req.arg(3));
        if (classify(replies, n) == Outcome::committed) return finish(c, Outcome::committed);
        c.pending = Outcome::aborted;
        if (needs_undo(replies, n)) return undo(c, Phase::undo_leg2, req.arg(3), id);
        return undo(c, Phase::undo, req.arg(0), *c.leg1);
      }
      case Phase::undo_leg2:
        if (classify(replies, replica_count(req.arg(3))) != Outcome::committed) ++rec.failed_compensations;
        return undo(c, Phase::undo, req.arg(0), *c.leg1);
      case Phase::undo:
        if (classify(replies, replica_count(req.arg(0))) != Outcome::committed) ++rec.failed_compensations;
        return finish(c, c.pending);
      case Phase::idle:
        return;
    }
  }

  bool on_read(const std::string& server, const CorrelationId& id, const Term& result) {
    auto it = clients.find(id.origin);
    if (it == clients.end()) return true;
    ClientState& c = it->second;
    if (c.phase != ClientState::Phase::lookup || c.finished.count(id)) return true;
    auto [first, inserted] = c.first_server.try_emplace(id, server);
    OpRecord& rec = d.records_[c.record];
    if (first->second == server) {
      rec.results.push_back(result);
    } else {
      ++rec.absorbed;
    }
    return true;
  }
};

std::string Deployment::replica_name(const std::string& bank, int index) {
  return bank + "-r" + std::to_string(index);
}

Deployment::Deployment(simnet::Simulation& sim, DeploymentConfig config)
    : sim_(sim), config_(std::move(config)), driver_(std::make_unique<Driver>(*this)) {
  World& world = sim_.world();

  toolkit::ClientOptions options;
  options.replicated = true;
  options.timeout = config_.timeout;

  toolkit::CommHooks writes;
  writes.accepts = [](const Term& p) { return p.is_compound() && write_functors().count(p.text()) > 0; };
  writes.consume = [](const std::string&, const CorrelationId&, const Term&) { return true; };
  writes.some_policy = [this](const std::string& client, const CorrelationId& id, std::span<const Reply> replies) {
    driver_->on_policy(client, id, replies);
    return Decision::commit;
  };
  toolkit::CommHooks reads;
  reads.accepts = [](const Term& p) { return p.is_compound() && p.text() == "look-up"; };
  reads.consume = [this](const std::string& server, const CorrelationId& id, const Term& result) {
    return driver_->on_read(server, id, result);
  };
  reads.some_policy = writes.some_policy;

  RuleSet client_rules("bank-client");
  client_rules.append(toolkit::make_rpc_client_rules(options, writes));
  client_rules.append(toolkit::make_query_client_rules(options, reads));
  client_rules.append(toolkit::make_timer_rules());
  RuleSetId client_id = world.add_ruleset(std::move(client_rules));

  for (const BankSpec& bank : config_.banks) {
    if (bank.replicas < 1) throw BankError("bank " + bank.name + " needs at least one replica");
    if (replica_counts_.count(bank.name)) throw BankError("duplicate bank " + bank.name);
    replica_counts_[bank.name] = static_cast<std::size_t>(bank.replicas);

    toolkit::CommHooks server;
    std::string name = bank.name;
    server.accepts = [name](const Term& p) {
      return p.is_compound() && p.arity() > 0 && p.arg(0).is_atom() && p.arg(0).text() == name;
    };
    server.produce = [this](const std::string& s, const CorrelationId& id, const Term& p) {
      return replica(s).apply(p, id.to_string());
    };
    server.produce_stream = [this](const std::string& s, const CorrelationId&, const Term& p) {
      return replica(s).statements(p);
    };
    RuleSet rules("bank-server-" + bank.name);
    rules.append(toolkit::make_rpc_server_rules(server));
    rules.append(toolkit::make_query_server_rules(server));
    RuleSetId rules_id = world.add_ruleset(std::move(rules));

    for (int i = 1; i <= bank.replicas; ++i) {
      std::string rname = replica_name(bank.name, i);
      auto rep = std::make_unique<Replica>(rname, bank.name);
      for (const auto& [account, balance] : bank.accounts) rep->seed_account(account, balance);
      replicas_.emplace(rname, std::move(rep));
      std::vector<Term> pool{Term::compound("server", {Term::atom(rname)})};
      world.add_agent(rname, rules_id, pool);
    }
  }

  for (const std::string& name : config_.clients) {
    if (driver_->clients.count(name)) throw BankError("duplicate client " + name);
    std::vector<Term> pool{Term::compound("client", {Term::atom(name)})};
    ClientState state;
    state.name = name;
    state.agent = world.add_agent(name, client_id, pool);
    driver_->clients.emplace(name, std::move(state));
    sim_.set_trigger_handler(name, [this, name](const Term& t) { submit(name, t); });
  }
}

Deployment::~Deployment() = default;

void Deployment::submit(const std::string& client, const Term& trigger) {
  auto it = driver_->clients.find(client);
  if (it == driver_->clients.end()) throw BankError("unknown client " + client);
  validate_trigger(trigger);
  it->second.queue.push_back(trigger);
  driver_->start_next(it->second);
}

std::vector<const Replica*> Deployment::replicas() const {
  std::vector<const Replica*> out;
  for (const BankSpec& b : config_.banks) {
    auto more = replicas_of(b.name);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

std::vector<const Replica*> Deployment::replicas_of(const std::string& bank) const {
  std::vector<const Replica*> out;
  auto it = replica_counts_.find(bank);
  if (it == replica_counts_.end()) return out;
  for (std::size_t i = 1; i <= it->second; ++i) {
    out.push_back(replicas_.at(replica_name(bank, static_cast<int>(i))).get());
  }
  return out;
}

Replica& Deployment::replica(const std::string& name) {
  auto it = replicas_.find(name);
  if (it == replicas_.end()) throw BankError("unknown replica " + name);
  return *it->second;
}

bool Deployment::idle() const {
  return std::all_of(driver_->clients.begin(), driver_->clients.end(), [](const auto& kv) {
    return kv.second.phase == ClientState::Phase::idle && kv.second.queue.empty();
  });
}

}  // namespace lokit::banking
