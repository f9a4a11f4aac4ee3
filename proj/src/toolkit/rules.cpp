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

#include <map>
#include <memory>
#include <stdexcept>

#include "lokit/toolkit.hpp"

namespace lokit::toolkit {

namespace {

using Log = std::map<Term, std::vector<Reply>, TermLess>;

std::string symbol_of(const Term& t) { return t.is_compound() ? t.text() : t.to_string(); }

CorrelationId correlation_of(const Binding& b) {
  auto id = CorrelationId::from_term(b.at("Id"));
  if (!id) throw std::logic_error("malformed correlation id " + b.at("Id").to_string());
  return *id;
}

GuardHook accepts_guard(const CommHooks& hooks) {
  auto accepts = hooks.accepts;
  return {"ACCEPTS",
          [accepts](const Binding& b, GuardContext&) -> std::optional<Binding> {
            if (accepts && !accepts(b.at("P"))) return std::nullopt;
            return b;
          },
          false,
          {}};
}

GuardHook fresh_id_guard(CorrelationKind kind) {
  const char* label = kind == CorrelationKind::rpc ? "GET-UNIQUE-RPC-ID" : "GET-UNIQUE-QUERY-ID";
  return {label,
          [kind](const Binding& b, GuardContext& ctx) -> std::optional<Binding> {
            if (ctx.world == nullptr) throw std::logic_error("fresh ids need a world");
            CorrelationId id{symbol_of(b.at("C")), ctx.world->next_counter(), kind};
            Binding out = b;
            out.bind("Id", id.to_term());
            return out;
          },
          true,
          {"Id"}};
}

GuardHook produce_guard(const CommHooks& hooks) {
  auto produce = hooks.produce;
  return {"PRODUCE",
          [produce](const Binding& b, GuardContext&) -> std::optional<Binding> {
            Term result;
            if (!produce) {
              result = Term::compound("err", {Term::atom("no-producer")});
            } else {
              try {
                result = produce(symbol_of(b.at("S")), correlation_of(b), b.at("P"));
              } catch (const std::exception& e) {
                result = Term::compound("err", {Term::string(e.what())});
              }
            }
            Binding out = b;
            out.bind("R", result);
            return out;
          },
          true,
          {"R"}};
}

GuardHook produce_stream_guard(const CommHooks& hooks) {
  auto produce = hooks.produce_stream;
  return {"PRODUCE",
          [produce](const Binding& b, GuardContext&) -> std::optional<Binding> {
            std::vector<Term> results;
            if (produce) {
              try {
                results = produce(symbol_of(b.at("S")), correlation_of(b), b.at("P"));
              } catch (const std::exception& e) {
                results = {Term::compound("err", {Term::string(e.what())})};
              }
            }
            Binding out = b;
            out.bind("Rs", Term::compound("results", std::move(results)));
            return out;
          },
          true,
          {"Rs"}};
}

GuardHook consume_guard(const CommHooks& hooks, std::shared_ptr<Log> log) {
  auto consume = hooks.consume;
  return {"CONSUME",
          [consume, log](const Binding& b, GuardContext&) -> std::optional<Binding> {
            std::string server = symbol_of(b.at("S"));
            const Term& result = b.at("R");
            if (consume && !consume(server, correlation_of(b), result)) return std::nullopt;
            (*log)[b.at("Id")].push_back(Reply{server, result});
            return b;
          },
          true,
          {}};
}

GuardHook policy_guard(const CommHooks& hooks, std::shared_ptr<Log> log) {
  auto policy = hooks.some_policy;
  return {"SOME-POLICY",
          [policy, log](const Binding& b, GuardContext&) -> std::optional<Binding> {
            std::span<const Reply> replies;
            if (auto it = log->find(b.at("Id")); it != log->end()) replies = it->second;
            if (policy) policy(symbol_of(b.at("C")), correlation_of(b), replies);
            return b;
          },
          true,
          {}};
}

GuardHook succ_guard() {
  return {"SUCC",
          [](const Binding& b, GuardContext&) -> std::optional<Binding> {
            const Term& k = b.at("K");
            if (!k.is_integer()) return std::nullopt;
            Binding out = b;
            out.bind("K1", Term::integer(k.as_integer() + 1));
            return out;
          },
          false,
          {"K1"}};
}

// k-th (not last) element of the produced stream: 1 <= K < n.
GuardHook stream_next_guard() {
  return {"NEXT-RESULT",
          [](const Binding& b, GuardContext&) -> std::optional<Binding> {
            const Term& k = b.at("K");
            const Term& rs = b.at("Rs");
            if (!k.is_integer()) return std::nullopt;
            auto n = static_cast<std::int64_t>(rs.arity());
            std::int64_t i = k.as_integer();
            if (i < 1 || i >= n) return std::nullopt;
            Binding out = b;
            out.bind("R", rs.arg(static_cast<std::size_t>(i - 1)));
            out.bind("K1", Term::integer(i + 1));
            return out;
          },
          false,
          {"R", "K1"}};
}

GuardHook stream_last_guard() {
  return {"LAST-RESULT",
          [](const Binding& b, GuardContext&) -> std::optional<Binding> {
            const Term& k = b.at("K");
            const Term& rs = b.at("Rs");
            if (!k.is_integer() || rs.arity() == 0) return std::nullopt;
            if (k.as_integer() != static_cast<std::int64_t>(rs.arity())) return std::nullopt;
            Binding out = b;
            out.bind("R", rs.arg(rs.arity() - 1));
            return out;
          },
          false,
          {"R"}};
}

GuardHook wait_guard() {
  return {"WAIT",
          [](const Binding& b, GuardContext& ctx) -> std::optional<Binding> {
            if (ctx.world == nullptr || ctx.agent == nullptr) throw std::logic_error("WAIT needs a world");
            const Term& key = b.at("Id");
            switch (ctx.world->timer_state(ctx.agent->id, key)) {
              case World::TimerState::expired:
                return b;
              case World::TimerState::unarmed:
                ctx.world->arm_timer(ctx.agent->id, key, SimTime::from_ticks(b.at("T").as_integer()));
                return std::nullopt;
              case World::TimerState::armed:
                return std::nullopt;
            }
            return std::nullopt;
          },
          false,
          {}};
}

std::string timer_group(const ClientOptions& options) {
  return "timer(C,Id," + std::to_string(options.timeout->ticks()) + ")";
}

Rule initiation(std::string name, const char* blocked_state, const char* message, CorrelationKind kind,
                const ClientOptions& options, const CommHooks& hooks) {
  std::string blocked = std::string("client(C,") + blocked_state + ",Id)";
  std::vector<std::string> groups{blocked};
  if (options.timeout) {
    if (options.timeout->ticks() <= 0) throw std::invalid_argument("timeout must be positive");
    groups.push_back(timer_group(options));
  }
  std::vector<std::string_view> views(groups.begin(), groups.end());
  return make_rule(std::move(name), "client(C) trigger(P)", {accepts_guard(hooks), fresh_id_guard(kind)}, views,
                   std::string(message) + "(Id,P)");
}

}  // namespace

const char* to_string(Decision d) { return d == Decision::commit ? "commit" : "abort"; }

Term CorrelationId::to_term() const {
  return Term::compound(kind == CorrelationKind::rpc ? "rpc-id" : "query-id",
                        {Term::atom(origin), Term::integer(counter)});
}

std::optional<CorrelationId> CorrelationId::from_term(const Term& t) {
  if (!t.is_compound() || t.arity() != 2 || !t.arg(0).is_compound() || !t.arg(1).is_integer()) {
    return std::nullopt;
  }
  CorrelationKind kind;
  if (t.text() == "rpc-id") {
    kind = CorrelationKind::rpc;
  } else if (t.text() == "query-id") {
    kind = CorrelationKind::query;
  } else {
    return std::nullopt;
  }
  return CorrelationId{t.arg(0).text(), t.arg(1).as_integer(), kind};
}

RuleSet make_rpc_client_rules(const ClientOptions& options, const CommHooks& hooks) {
  auto log = std::make_shared<Log>();
  const bool timed = options.timeout.has_value();
  const std::string r = options.replicated ? "Rr" : "R";
  RuleSet rules(options.replicated ? "rpc-client-replicated" : "rpc-client");

  rules.add(initiation(r + (timed ? "1_t" : "1"), "blocked", "msg-request", CorrelationKind::rpc, options, hooks));
  if (options.replicated) {
    rules.add(make_rule("Rr3", "client(C,blocked,Id) msg-reply(S,Id,R)", {consume_guard(hooks, log)},
                        {"client(C)", "client(C,catch-follow-up-replies,Id)"}));
    rules.add(make_rule("Rr4", "client(C,catch-follow-up-replies,Id) msg-reply(S,Id,R)",
                        {consume_guard(hooks, log)}, {"client(C,catch-follow-up-replies,Id)"}));
  } else {
    rules.add(make_rule("R3", "client(C,blocked,Id) msg-reply(S,Id,R)", {consume_guard(hooks, log)}, {"client(C)"}));
  }
  if (timed) {
    rules.add(make_rule(r + "3_t", "client(C,blocked,Id) timeout(C,Id)", {policy_guard(hooks, log)}, {"client(C)"}));
    if (options.replicated) {
      rules.add(make_rule("Rr4_t", "client(C,catch-follow-up-replies,Id) timeout(C,Id)", {policy_guard(hooks, log)},
                          {}));
    }
  }
  return rules;
}

RuleSet make_rpc_server_rules(const CommHooks& hooks) {
  RuleSet rules("rpc-server");
  rules.add(make_rule("R2", "server(S) msg-request(Id,P)", {accepts_guard(hooks), produce_guard(hooks)},
                      {"server(S)"}, "msg-reply(S,Id,R)"));
  return rules;
}

RuleSet make_query_client_rules(const ClientOptions& options, const CommHooks& hooks) {
  auto log = std::make_shared<Log>();
  const bool timed = options.timeout.has_value();
  RuleSet rules(options.replicated ? "query-client-replicated" : "query-client");

  if (!options.replicated) {
    rules.add(initiation(timed ? "Q1_t" : "Q1", "blocked(1)", "msg-query", CorrelationKind::query, options, hooks));
    rules.add(make_rule("Q3", "client(C,blocked(K),Id) msg-reply(S,K,Id,R)", {succ_guard(), consume_guard(hooks, log)},
                        {"client(C,blocked(K1),Id)"}));
    rules.add(make_rule("Q4", "client(C,blocked(K),Id) msg-reply(S,last,K,Id,R)", {consume_guard(hooks, log)},
                        {"client(C)"}));
    rules.add(make_rule("Q4_0", "client(C,blocked(1),Id) msg-reply(S,last,0,Id,empty)", {}, {"client(C)"}));
    if (timed) {
      rules.add(make_rule("Q3_t", "client(C,blocked(1),Id) timeout(C,Id)", {policy_guard(hooks, log)}, {"client(C)"}));
      rules.add(make_rule("Q4_t", "client(C,blocked(K),Id) timeout(C,Id)", {policy_guard(hooks, log)}, {"client(C)"}));
    }
    return rules;
  }

  std::vector<std::string_view> after_first_last{"client(C)", "client(C,blocked-other-server(1),Id)"};
  if (options.first_only) after_first_last.pop_back();

  rules.add(initiation(timed ? "Qr1_t" : "Qr1", "blocked(1)", "msg-query", CorrelationKind::query, options, hooks));
  rules.add(make_rule("Qr3", "client(C,blocked(1),Id) msg-reply(S,1,Id,R)", {consume_guard(hooks, log)},
                      {"client(C,blocked(S,2),Id)", "client(C,blocked-other-server(1),Id)"}));
  rules.add(make_rule("Qr4", "client(C,blocked(1),Id) msg-reply(S,last,1,Id,R)", {consume_guard(hooks, log)},
                      after_first_last));
  rules.add(make_rule("Qr4_0", "client(C,blocked(1),Id) msg-reply(S,last,0,Id,empty)", {}, after_first_last));
  rules.add(make_rule("Qr5", "client(C,blocked(S,K),Id) msg-reply(S,K,Id,R)", {succ_guard(), consume_guard(hooks, log)},
                      {"client(C,blocked(S,K1),Id)"}));
  rules.add(make_rule("Qr6", "client(C,blocked(S,K),Id) msg-reply(S,last,K,Id,R)", {consume_guard(hooks, log)},
                      {"client(C)"}));
  rules.add(make_rule("Qr7", "client(C,blocked-other-server(1),Id) msg-reply(S,1,Id,R)", {consume_guard(hooks, log)},
                      {"client(C,blocked-other-server(1),Id)", "client(C,blocked-other-server(S,2),Id)"}));
  rules.add(make_rule("Qr8", "client(C,blocked-other-server(1),Id) msg-reply(S,last,1,Id,R)",
                      {consume_guard(hooks, log)}, {"client(C,blocked-other-server(1),Id)"}));
  rules.add(make_rule("Qr8_0", "client(C,blocked-other-server(1),Id) msg-reply(S,last,0,Id,empty)", {},
                      {"client(C,blocked-other-server(1),Id)"}));
  rules.add(make_rule("Qr9", "client(C,blocked-other-server(S,K),Id) msg-reply(S,K,Id,R)",
                      {succ_guard(), consume_guard(hooks, log)}, {"client(C,blocked-other-server(S,K1),Id)"}));
  rules.add(make_rule("Qr10", "client(C,blocked-other-server(S,K),Id) msg-reply(S,last,K,Id,R)",
                      {consume_guard(hooks, log)}, {}));
  if (timed) {
    rules.add(make_rule("Qr3_t", "client(C,blocked(1),Id) timeout(C,Id)", {policy_guard(hooks, log)}, {"client(C)"}));
    rules.add(
        make_rule("Qr4_t", "client(C,blocked(S,K),Id) timeout(C,Id)", {policy_guard(hooks, log)}, {"client(C)"}));
    rules.add(make_rule("Qr5_t", "client(C,blocked-other-server(1),Id) timeout(C,Id)", {policy_guard(hooks, log)}, {}));
    rules.add(
        make_rule("Qr6_t", "client(C,blocked-other-server(S,K),Id) timeout(C,Id)", {policy_guard(hooks, log)}, {}));
  }
  return rules;
}

RuleSet make_query_server_rules(const CommHooks& hooks) {
  RuleSet rules("query-server");
  rules.add(make_rule("Q2", "server(S) msg-query(Id,P)", {accepts_guard(hooks), produce_stream_guard(hooks)},
                      {"server(S) replying(S,Id,1,Rs)"}));
  rules.add(make_rule("Q2.reply", "replying(S,Id,K,Rs)", {stream_next_guard()}, {"replying(S,Id,K1,Rs)"},
                      "msg-reply(S,K,Id,R)"));
  rules.add(make_rule("Q2.last", "replying(S,Id,K,Rs)", {stream_last_guard()}, {""}, "msg-reply(S,last,K,Id,R)"));
  rules.add(make_rule("Q2.empty", "replying(S,Id,1,results)", {}, {""}, "msg-reply(S,last,0,Id,empty)"));
  return rules;
}

RuleSet make_timer_rules() {
  RuleSet rules("timer");
  rules.add(make_rule("T", "timer(C,Id,T)", {wait_guard()}, {}, "timeout(C,Id)"));
  rules.add(make_rule("Tgc", "client(C) timeout(C,Id)", {}, {"client(C)"}));
  return rules;
}

AgentId set_timer(World& world, RuleSetId timer_rules, const TimerSpec& spec) {
  if (spec.timeout.ticks() <= 0) throw std::invalid_argument("timer value must be positive");
  if (!world.ruleset(timer_rules).find("T")) throw std::invalid_argument("rule set has no timer rule T");
  Term resource = Term::compound("timer", {Term::atom(spec.owner), spec.correlation.to_term(),
                                           Term::integer(spec.timeout.ticks())});
  std::string name = "timer-" + spec.owner + "-" + std::to_string(spec.correlation.counter);
  for (int i = 1; world.find(name); ++i) name += "." + std::to_string(i);
  std::vector<Term> pool{resource};
  return world.add_agent(name, timer_rules, pool);
}

Decision majority_policy(std::size_t total_servers, const std::set<std::string>& servers) {
  if (total_servers == 0) throw std::invalid_argument("majority over zero servers");
  return 2 * servers.size() > total_servers ? Decision::commit : Decision::abort;
}

Decision majority_policy(std::size_t total_servers, std::span<const Reply> replies) {
  std::set<std::string> servers;
  for (const Reply& r : replies) servers.insert(r.server);
  return majority_policy(total_servers, servers);
}

Decision first_reply_policy(std::span<const Reply> replies) {
  return replies.empty() ? Decision::abort : Decision::commit;
}

Term query_reply(const std::string& server, ReplyTag tag, const CorrelationId& id, const Term& result) {
  if (tag.is_last) {
    return Term::compound("msg-reply", {Term::atom(server), Term::atom("last"), Term::integer(tag.reply_no),
                                        id.to_term(), result});
  }
  return Term::compound("msg-reply", {Term::atom(server), Term::integer(tag.reply_no), id.to_term(), result});
}

}  // namespace lokit::toolkit
