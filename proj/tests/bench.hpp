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

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lokit/simnet.hpp"
#include "lokit/toolkit.hpp"

namespace lokit::testing {

struct ConsumeEvent {
  std::string server;
  toolkit::CorrelationId id;
  Term result;
};

struct PolicyEvent {
  std::string client;
  toolkit::CorrelationId id;
  std::vector<toolkit::Reply> replies;
  SimTime at;
  toolkit::Decision decision;
};

// A small client/server world with recording hooks. Clients are c1..cN,
// servers s1..sM; every client and server runs the same rule sets.
class Bench {
 public:
  explicit Bench(simnet::NetPolicy policy = {}) : sim(policy) {}

  simnet::Simulation sim;
  std::vector<ConsumeEvent> consumes;
  std::vector<PolicyEvent> policies;
  std::size_t total_servers = 0;
  // Query servers: the reply stream for (server, params). Default: n results r(server,k).
  std::function<std::vector<Term>(const std::string&, const Term&)> stream;
  std::size_t replies_per_server = 1;

  World& world() { return sim.world(); }

  toolkit::CommHooks client_hooks() {
    toolkit::CommHooks h;
    h.consume = [this](const std::string& s, const toolkit::CorrelationId& id, const Term& r) {
      consumes.push_back({s, id, r});
      return true;
    };
    h.some_policy = [this](const std::string& c, const toolkit::CorrelationId& id,
                           std::span<const toolkit::Reply> replies) {
      auto d = toolkit::majority_policy(total_servers, replies);
      policies.push_back({c, id, {replies.begin(), replies.end()}, sim.now(), d});
      return d;
    };
    return h;
  }

  toolkit::CommHooks server_hooks() {
    toolkit::CommHooks h;
    h.produce = [](const std::string& s, const toolkit::CorrelationId&, const Term& p) {
      return Term::compound("done", {Term::atom(s), p});
    };
    h.produce_stream = [this](const std::string& s, const toolkit::CorrelationId&, const Term& p) {
      if (stream) return stream(s, p);
      std::vector<Term> out;
      for (std::size_t k = 1; k <= replies_per_server; ++k) {
        out.push_back(Term::compound("r", {Term::atom(s), Term::integer(static_cast<std::int64_t>(k))}));
      }
      return out;
    };
    return h;
  }

  void add_rpc(const toolkit::ClientOptions& options, int clients, int servers) {
    RuleSet c = toolkit::make_rpc_client_rules(options, client_hooks());
    c.append(toolkit::make_timer_rules());
    populate(std::move(c), toolkit::make_rpc_server_rules(server_hooks()), clients, servers);
  }

  void add_query(const toolkit::ClientOptions& options, int clients, int servers) {
    RuleSet c = toolkit::make_query_client_rules(options, client_hooks());
    c.append(toolkit::make_timer_rules());
    populate(std::move(c), toolkit::make_query_server_rules(server_hooks()), clients, servers);
  }

  void trigger(const std::string& client, const Term& params, SimTime at = SimTime()) {
    sim.schedule_trigger(client, params, at);
  }

  // Live agents holding a client(C, State, Id) resource whose State has functor `state`.
  std::size_t live_in_state(std::string_view state) const {
    std::size_t n = 0;
    for (const auto& [id, a] : sim.world().agents()) {
      if (!a.alive) continue;
      for (const Term& t : a.pool) {
        if (t.is_compound() && t.text() == "client" && t.arity() == 3 && t.arg(1).is_compound() &&
            t.arg(1).text() == state) {
          ++n;
          break;
        }
      }
    }
    return n;
  }

  bool holds(const std::string& agent, const Term& t) const {
    auto id = sim.world().find(agent);
    return id && sim.world().agent(*id).pool.contains(t);
  }

  std::vector<const ConsumeEvent*> consumes_for(const std::string& server) const {
    std::vector<const ConsumeEvent*> out;
    for (const auto& c : consumes) {
      if (c.server == server) out.push_back(&c);
    }
    return out;
  }

 private:
  void populate(RuleSet client_rules, RuleSet server_rules, int clients, int servers) {
    auto cid = world().add_ruleset(std::move(client_rules));
    auto sid = world().add_ruleset(std::move(server_rules));
    total_servers = static_cast<std::size_t>(servers);
    for (int i = 1; i <= clients; ++i) {
      std::string name = "c" + std::to_string(i);
      std::vector<Term> pool{Term::compound("client", {Term::atom(name)})};
      world().add_agent(name, cid, pool);
    }
    for (int i = 1; i <= servers; ++i) {
      std::string name = "s" + std::to_string(i);
      std::vector<Term> pool{Term::compound("server", {Term::atom(name)})};
      world().add_agent(name, sid, pool);
    }
  }
};

struct FeedResult {
  // Reply numbers consumed per server, in consumption order.
  std::map<std::string, std::vector<std::int64_t>> consumed;
  // client(c1) reappeared before the stream it follows was fully consumed.
  bool early_unblock = false;
  bool unblocked = false;
  std::size_t live_agents = 0;
  std::size_t spawned = 0;
};

// Drives one query client (no transport, no servers): triggers it, then
// delivers reply (server, k) of an n-reply stream in `order`, each one to
// every live instance of the client, running the kernel after each delivery.
inline FeedResult feed_query(bool replicated, int replies, const std::vector<std::pair<int, int>>& order) {
  FeedResult out;
  simnet::Simulation sim;
  World& w = sim.world();
  std::string first_server;
  toolkit::CommHooks hooks;
  hooks.consume = [&](const std::string& s, const toolkit::CorrelationId&, const Term& r) {
    if (first_server.empty()) first_server = s;
    out.consumed[s].push_back(r.arg(1).as_integer());
    return true;
  };
  toolkit::ClientOptions o;
  o.replicated = replicated;
  auto rs = w.add_ruleset(toolkit::make_query_client_rules(o, hooks));
  std::vector<Term> pool{"client(c1)"_t, "trigger(q)"_t};
  AgentId c1 = w.add_agent("c1", rs, pool);
  w.run_to_quiescence();
  Term id;
  for (const Term& t : w.agent(c1).pool) {
    if (t.text() == "client" && t.arity() == 3) id = t.arg(2);
  }
  auto cid = *toolkit::CorrelationId::from_term(id);
  std::size_t initial = w.agents().size();

  for (auto [s, k] : order) {
    std::string server = "s" + std::to_string(s);
    Term reply = toolkit::query_reply(server, {k, k == replies}, cid,
                                      Term::compound("r", {Term::atom(server), Term::integer(k)}));
    std::vector<AgentId> targets;
    for (const auto& [aid, a] : w.agents()) {
      if (a.alive && a.root == "c1") targets.push_back(aid);
    }
    for (AgentId t : targets) w.deliver(t, reply);
    w.run_to_quiescence();
    if (!out.unblocked && w.agent(c1).pool.contains("client(c1)"_t)) {
      out.unblocked = true;
      auto it = out.consumed.find(first_server);
      out.early_unblock = it == out.consumed.end() || it->second.size() != static_cast<std::size_t>(replies);
    }
  }
  out.live_agents = w.live_agent_count();
  out.spawned = w.agents().size() - initial;
  return out;
}

}  // namespace lokit::testing
