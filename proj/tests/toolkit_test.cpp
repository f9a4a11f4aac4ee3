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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "bench.hpp"
#include "lokit/toolkit.hpp"

namespace lokit::toolkit {
namespace {

using Names = std::vector<std::string>;

ClientOptions opts(bool replicated, bool timed, bool first_only = false) {
  ClientOptions o;
  o.replicated = replicated;
  if (timed) o.timeout = SimTime::seconds(5);
  o.first_only = first_only;
  return o;
}

TEST(RuleSets, RpcClientVariants) {
  EXPECT_EQ(make_rpc_client_rules(opts(false, false), {}).rule_names(), (Names{"R1", "R3"}));
  EXPECT_EQ(make_rpc_client_rules(opts(false, true), {}).rule_names(), (Names{"R1_t", "R3", "R3_t"}));
  EXPECT_EQ(make_rpc_client_rules(opts(true, false), {}).rule_names(), (Names{"Rr1", "Rr3", "Rr4"}));
  EXPECT_EQ(make_rpc_client_rules(opts(true, true), {}).rule_names(),
            (Names{"Rr1_t", "Rr3", "Rr4", "Rr3_t", "Rr4_t"}));
}

TEST(RuleSets, QueryClientVariants) {
  EXPECT_EQ(make_query_client_rules(opts(false, false), {}).rule_names(), (Names{"Q1", "Q3", "Q4", "Q4_0"}));
  EXPECT_EQ(make_query_client_rules(opts(false, true), {}).rule_names(),
            (Names{"Q1_t", "Q3", "Q4", "Q4_0", "Q3_t", "Q4_t"}));
  EXPECT_EQ(make_query_client_rules(opts(true, false), {}).rule_names(),
            (Names{"Qr1", "Qr3", "Qr4", "Qr4_0", "Qr5", "Qr6", "Qr7", "Qr8", "Qr8_0", "Qr9", "Qr10"}));
  EXPECT_EQ(make_query_client_rules(opts(true, true), {}).rule_names(),
            (Names{"Qr1_t", "Qr3", "Qr4", "Qr4_0", "Qr5", "Qr6", "Qr7", "Qr8", "Qr8_0", "Qr9", "Qr10", "Qr3_t", "Qr4_t",
                   "Qr5_t", "Qr6_t"}));
}

TEST(RuleSets, ServerAndTimerSets) {
  EXPECT_EQ(make_rpc_server_rules({}).rule_names(), (Names{"R2"}));
  EXPECT_EQ(make_query_server_rules({}).rule_names(), (Names{"Q2", "Q2.reply", "Q2.last", "Q2.empty"}));
  EXPECT_EQ(make_timer_rules().rule_names(), (Names{"T", "Tgc"}));
}

TEST(RuleSets, FirstOnlyDropsTheOtherServerCatcher) {
  RuleSet rs = make_query_client_rules(opts(true, false, true), {});
  const Rule* qr4 = rs.find("Qr4");
  ASSERT_NE(qr4, nullptr);
  EXPECT_EQ(qr4->rhs_groups.size(), 1u);
  EXPECT_EQ(make_query_client_rules(opts(true, false), {}).find("Qr4")->rhs_groups.size(), 2u);
}

TEST(Correlation, RoundTripsThroughTerms) {
  CorrelationId id{"c7", 12, CorrelationKind::query};
  EXPECT_EQ(id.to_term(), "query-id(c7,12)"_t);
  EXPECT_EQ(CorrelationId::from_term(id.to_term()), id);
  EXPECT_FALSE(CorrelationId::from_term("other(c7,12)"_t).has_value());
}

// A server plus a silent observer that collects whatever the server emits.
struct ServerProbe {
  explicit ServerProbe(RuleSet server_rules) {
    auto sid = sim.world().add_ruleset(std::move(server_rules));
    auto idle = sim.world().add_ruleset(RuleSet("idle"));
    std::vector<Term> pool{"server(s1)"_t};
    server = sim.world().add_agent("s1", sid, pool);
    observer = sim.world().add_agent("obs", idle);
  }
  std::vector<Term> run(const Term& request) {
    sim.inject(server, request);
    sim.advance();
    return sim.world().agent(observer).pool.to_vector();
  }
  simnet::Simulation sim;
  AgentId server;
  AgentId observer;
};

TEST(RpcServer, RepliesWithProducedResult) {
  CommHooks h;
  h.produce = [](const std::string&, const CorrelationId&, const Term& p) { return p.arg(p.arity() - 1); };
  ServerProbe probe(make_rpc_server_rules(h));
  auto out = probe.run("msg-request(rpc-id(c1,1),echo(5))"_t);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], "msg-reply(s1,rpc-id(c1,1),5)"_t);
  EXPECT_TRUE(probe.sim.world().agent(probe.server).pool.contains("server(s1)"_t));
}

TEST(RpcServer, ProducerFailureBecomesErrResult) {
  CommHooks h;
  h.produce = [](const std::string&, const CorrelationId&, const Term&) -> Term { throw std::runtime_error("boom"); };
  ServerProbe probe(make_rpc_server_rules(h));
  auto out = probe.run("msg-request(rpc-id(c1,1),x)"_t);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], parse_term("msg-reply(s1,rpc-id(c1,1),err(\"boom\"))"));
}

TEST(RpcServer, AcceptsFilterLeavesForeignRequests) {
  CommHooks h;
  h.produce = [](const std::string&, const CorrelationId&, const Term&) { return "ok"_t; };
  h.accepts = [](const Term& p) { return p.text() == "mine"; };
  ServerProbe probe(make_rpc_server_rules(h));
  EXPECT_TRUE(probe.run("msg-request(rpc-id(c1,1),theirs)"_t).empty());
  EXPECT_EQ(probe.run("msg-request(rpc-id(c1,2),mine)"_t).size(), 1u);
}

TEST(QueryServer, StreamsTaggedReplies) {
  CommHooks h;
  h.produce_stream = [](const std::string&, const CorrelationId&, const Term&) {
    return std::vector<Term>{"a"_t, "b"_t, "c"_t};
  };
  ServerProbe probe(make_query_server_rules(h));
  auto out = probe.run("msg-query(query-id(c1,1),q)"_t);
  std::vector<Term> expect{"msg-reply(s1,1,query-id(c1,1),a)"_t, "msg-reply(s1,2,query-id(c1,1),b)"_t,
                           "msg-reply(s1,last,3,query-id(c1,1),c)"_t};
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(out, expect);
  EXPECT_EQ(probe.sim.world().agent(probe.server).pool, (Pool{"server(s1)"_t}));
}

TEST(QueryServer, SingleAndEmptyStreams) {
  CommHooks one;
  one.produce_stream = [](const std::string&, const CorrelationId&, const Term&) { return std::vector<Term>{"x"_t}; };
  ServerProbe p1(make_query_server_rules(one));
  EXPECT_EQ(p1.run("msg-query(query-id(c1,1),q)"_t), (std::vector<Term>{"msg-reply(s1,last,1,query-id(c1,1),x)"_t}));

  CommHooks none;
  none.produce_stream = [](const std::string&, const CorrelationId&, const Term&) { return std::vector<Term>{}; };
  ServerProbe p0(make_query_server_rules(none));
  EXPECT_EQ(p0.run("msg-query(query-id(c1,1),q)"_t),
            (std::vector<Term>{"msg-reply(s1,last,0,query-id(c1,1),empty)"_t}));
}

TEST(QueryClient, EmptyStreamUnblocksWithoutConsume) {
  testing::Bench bench;
  bench.stream = [](const std::string&, const Term&) { return std::vector<Term>{}; };
  bench.add_query(opts(false, false), 1, 1);
  bench.trigger("c1", "q"_t);
  bench.sim.advance();
  EXPECT_TRUE(bench.consumes.empty());
  EXPECT_TRUE(bench.holds("c1", "client(c1)"_t));
}

TEST(RpcPlain, OneConsumePerRequestAndClientReady) {
  testing::Bench bench;
  bench.add_rpc(opts(false, false), 1, 1);
  for (int i = 0; i < 3; ++i) bench.trigger("c1", Term::integer(i), SimTime::seconds(10 * i));
  EXPECT_TRUE(bench.sim.advance().completed);
  ASSERT_EQ(bench.consumes.size(), 3u);
  std::set<CorrelationId> ids;
  for (const auto& c : bench.consumes) ids.insert(c.id);
  EXPECT_EQ(ids.size(), 3u);
  EXPECT_TRUE(bench.holds("c1", "client(c1)"_t));
  EXPECT_EQ(bench.world().live_agent_count(), 2u);
}

TEST(RpcPlain, ConcurrentRequestsBindByCorrelation) {
  testing::Bench bench;
  bench.add_rpc(opts(false, false), 2, 1);
  bench.trigger("c1", "from(c1)"_t);
  bench.trigger("c2", "from(c2)"_t);
  bench.sim.advance();
  ASSERT_EQ(bench.consumes.size(), 2u);
  for (const auto& c : bench.consumes) {
    // done(Server, from(Client)): the reply consumed under an id is the one produced for its origin.
    EXPECT_EQ(c.result.arg(1).arg(0).text(), c.id.origin);
  }
}

TEST(RpcPlain, SuspendedServerRepliesOnlyAfterResume) {
  testing::Bench bench;
  bench.add_rpc(opts(false, false), 1, 1);
  bench.sim.schedule_fault({simnet::FaultKind::suspend, "s1", {}}, SimTime());
  bench.trigger("c1", "x"_t);
  bench.sim.schedule_fault({simnet::FaultKind::resume, "s1", {}}, SimTime::seconds(50));
  SimTime consumed_at;
  bench.world().set_trace_sink([&](const TraceRecord& r) {
    if (r.rule == "R3") consumed_at = r.time;
  });
  bench.sim.advance();
  ASSERT_EQ(bench.consumes.size(), 1u);
  EXPECT_GE(consumed_at, SimTime::seconds(50));
}

TEST(RpcReplicated, MainPlusFollowUpConsumes) {
  testing::Bench bench;
  bench.add_rpc(opts(true, false), 1, 3);
  std::map<std::string, int> by_rule;
  bench.world().set_trace_sink([&](const TraceRecord& r) { ++by_rule[r.rule]; });
  bench.trigger("c1", "x"_t);
  bench.sim.advance();
  EXPECT_EQ(by_rule["Rr3"], 1);
  EXPECT_EQ(by_rule["Rr4"], 2);
  EXPECT_EQ(bench.consumes.size(), 3u);
  EXPECT_EQ(bench.live_in_state("catch-follow-up-replies"), 1u);
}

TEST(RpcReplicated, TimerTerminatesCatchAgent) {
  testing::Bench bench;
  bench.add_rpc(opts(true, true), 1, 3);
  bench.trigger("c1", "x"_t);
  bench.sim.advance();
  EXPECT_EQ(bench.live_in_state("catch-follow-up-replies"), 0u);
  EXPECT_EQ(bench.world().live_agent_count(), 4u);
  ASSERT_EQ(bench.policies.size(), 1u);
  EXPECT_EQ(bench.policies[0].replies.size(), 3u);
  EXPECT_EQ(bench.policies[0].decision, Decision::commit);
  // The stale timeout was absorbed by the ready client.
  for (const Term& t : bench.world().agent(*bench.world().find("c1")).pool) EXPECT_NE(t.text(), "timeout");
}

TEST(RpcReplicated, NoRepliesBeforeExpiryAborts) {
  testing::Bench bench;
  bench.add_rpc(opts(true, true), 1, 3);
  for (const char* s : {"s1", "s2", "s3"}) bench.sim.suspend(s);
  std::vector<std::string> rules;
  bench.world().set_trace_sink([&](const TraceRecord& r) { rules.push_back(r.rule); });
  bench.trigger("c1", "x"_t);
  bench.sim.advance();
  ASSERT_EQ(bench.policies.size(), 1u);
  EXPECT_TRUE(bench.policies[0].replies.empty());
  EXPECT_EQ(bench.policies[0].decision, Decision::abort);
  EXPECT_NE(std::find(rules.begin(), rules.end(), "Rr3_t"), rules.end());
  EXPECT_TRUE(bench.holds("c1", "client(c1)"_t));
}

TEST(QueryClient, OutOfOrderRepliesConsumedInSequence) {
  auto r = testing::feed_query(false, 3, {{1, 2}, {1, 3}, {1, 1}});
  EXPECT_EQ(r.consumed["s1"], (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_TRUE(r.unblocked);
  EXPECT_FALSE(r.early_unblock);
}

TEST(QueryClient, SingleLastReplyUnblocksImmediately) {
  auto r = testing::feed_query(false, 1, {{1, 1}});
  EXPECT_EQ(r.consumed["s1"], (std::vector<std::int64_t>{1}));
  EXPECT_TRUE(r.unblocked);
}

TEST(QueryReplicated, ThreeServersTwoRepliesEach) {
  testing::Bench bench;
  bench.replies_per_server = 2;
  bench.add_query(opts(true, false), 1, 3);
  std::map<std::string, int> by_rule;
  bench.world().set_trace_sink([&](const TraceRecord& r) { ++by_rule[r.rule]; });
  std::size_t initial = bench.world().agents().size();
  bench.trigger("c1", "q"_t);
  bench.sim.advance();
  // Per-server catch agents: one per extra server, each ended by Qr10.
  EXPECT_EQ(by_rule["Qr7"], 2);
  EXPECT_EQ(by_rule["Qr10"], 2);
  EXPECT_EQ(bench.live_in_state("blocked-other-server"), 1u);
  EXPECT_EQ(bench.world().live_agent_count(), initial + 1);
  EXPECT_EQ(bench.consumes.size(), 6u);
  for (const char* s : {"s1", "s2", "s3"}) {
    auto cs = bench.consumes_for(s);
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0]->result.arg(1).as_integer(), 1);
    EXPECT_EQ(cs[1]->result.arg(1).as_integer(), 2);
  }
}

TEST(QueryReplicated, TimerClearsAllCatchAgents) {
  testing::Bench bench;
  bench.replies_per_server = 2;
  bench.add_query(opts(true, true), 1, 3);
  std::size_t initial = bench.world().agents().size();
  bench.trigger("c1", "q"_t);
  bench.sim.advance();
  EXPECT_EQ(bench.live_in_state("blocked-other-server"), 0u);
  EXPECT_EQ(bench.world().live_agent_count(), initial);
}

TEST(Timer, ExpiresNoEarlierThanSetTimePlusT) {
  simnet::Simulation sim;
  auto rules = sim.world().add_ruleset(make_timer_rules());
  auto idle = sim.world().add_ruleset(RuleSet("idle"));
  AgentId obs = sim.world().add_agent("c1", idle);
  // Start the timer at sim-time 10.
  sim.schedule_delivery(obs, "tick"_t, SimTime::seconds(10));
  sim.advance();
  CorrelationId id{"c1", 1, CorrelationKind::rpc};
  set_timer(sim.world(), rules, {"c1", id, SimTime::seconds(5)});
  SimTime arrival;
  sim.set_event_observer([&](const simnet::SimEvent& e) {
    if (const auto* d = std::get_if<simnet::Delivery>(&e.payload); d && d->term.text() == "timeout") arrival = e.due;
  });
  sim.advance();
  EXPECT_TRUE(sim.world().agent(obs).pool.contains("timeout(c1,rpc-id(c1,1))"_t));
  EXPECT_GE(arrival, SimTime::seconds(15));
  EXPECT_THROW(set_timer(sim.world(), rules, {"c1", id, SimTime()}), std::invalid_argument);
}

TEST(Majority, Examples) {
  std::vector<Reply> two{{"s1", "ok"_t}, {"s2", "ok"_t}};
  std::vector<Reply> one{{"s1", "ok"_t}};
  std::vector<Reply> dup{{"s1", "ok"_t}, {"s1", "ok"_t}};
  EXPECT_EQ(majority_policy(3, two), Decision::commit);
  EXPECT_EQ(majority_policy(3, one), Decision::abort);
  EXPECT_EQ(majority_policy(1, one), Decision::commit);
  EXPECT_EQ(majority_policy(3, dup), Decision::abort);
  EXPECT_EQ(majority_policy(2, one), Decision::abort);
  EXPECT_THROW(majority_policy(0, one), std::invalid_argument);
}

TEST(Correlation, IdsAreUniqueAcrossClients) {
  testing::Bench bench;
  bench.add_rpc(opts(true, true), 4, 2);
  for (int i = 0; i < 5; ++i) {
    for (int c = 1; c <= 4; ++c) bench.trigger("c" + std::to_string(c), Term::integer(i), SimTime::seconds(20 * i));
  }
  bench.sim.advance();
  std::set<CorrelationId> ids;
  for (const auto& p : bench.policies) EXPECT_TRUE(ids.insert(p.id).second);
  EXPECT_EQ(ids.size(), 20u);
  for (const auto& c : bench.consumes) EXPECT_TRUE(ids.count(c.id));
}

}  // namespace
}  // namespace lokit::toolkit
