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

#include "lokit/scenario.hpp"
#include "random_scenario.hpp"

namespace lokit::cli {
namespace {

using banking::Outcome;

TEST(Parser, FullGrammar) {
  Scenario s = parse_scenario_text(
      "# comment\n"
      "seed 42\n"
      "delay 0.5 2\n"
      "drop 0.1\n"
      "timeout 7\n"
      "bank b replicas 2   # trailing comment\n"
      "account b a 10\n"
      "client c\n"
      "trigger c deposit(b,a,5) at 3\n"
      "trigger c look-up at 1\n"
      "suspend b-r1 at 2\n"
      "resume b-r1 at 4\n"
      "partition b-r1,c | b-r2 at 5\n"
      "heal at 6\n");
  EXPECT_EQ(s.seed, 42u);
  EXPECT_EQ(s.delay_min, SimTime::parse("0.5"));
  EXPECT_EQ(s.delay_max, SimTime::seconds(2));
  EXPECT_DOUBLE_EQ(s.drop_probability, 0.1);
  EXPECT_EQ(s.timeout, SimTime::seconds(7));
  ASSERT_EQ(s.banks.size(), 1u);
  EXPECT_EQ(s.banks[0].replicas, 2);
  EXPECT_EQ(s.banks[0].accounts.at(0), (std::pair<std::string, std::int64_t>{"a", 10}));
  EXPECT_EQ(s.triggers.size(), 2u);
  EXPECT_EQ(s.faults.size(), 4u);
  EXPECT_FALSE(s.fault_free());
  auto ordered = s.ordered_triggers();
  EXPECT_EQ(ordered[0].term, "look-up"_t);
}

std::size_t error_line(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return SIZE_MAX;
}

TEST(Parser, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("seed 1\nfrobnicate\n"), 2u);
  EXPECT_EQ(error_line("bank b replicas 0\n"), 1u);
  EXPECT_EQ(error_line("bank b replicas 1\naccount b a -5\n"), 2u);
  EXPECT_EQ(error_line("client c\ntrigger c deposit(b,a,0) at 0\n"), 2u);
  EXPECT_EQ(error_line("client c\ntrigger c deposit(b,a,1) at -1\n"), 2u);
  EXPECT_EQ(error_line("client c\ntrigger c deposit(b,a,1 at 0\n"), 2u);
  EXPECT_EQ(error_line("delay 3 1\n"), 1u);
  EXPECT_EQ(error_line("drop 1.5\n"), 1u);
  EXPECT_EQ(error_line("trigger nobody look-up at 0\n"), 0u);
  EXPECT_EQ(error_line("seed 1\n"), SIZE_MAX);
}

TEST(Oracle, TableExamples) {
  std::vector<banking::BankSpec> banks{{"b", 1, {{"alice", 100}, {"bob", 0}}}};
  OracleResult r = replay_oracle(banks, {"deposit(b,alice,50)"_t, "withdraw(b,alice,500)"_t,
                                         "transfer(b,alice,40,b,bob)"_t, "delete(b,bob)"_t, "create(b,carol)"_t,
                                         "look-up(b,bob)"_t});
  EXPECT_EQ(r.outcomes, (std::vector<Outcome>{Outcome::committed, Outcome::aborted_overdraft, Outcome::committed,
                                              Outcome::aborted, Outcome::committed, Outcome::read}));
  const auto& accounts = r.ledgers.at("b").accounts;
  EXPECT_EQ(accounts.at("alice").balance, 110);
  EXPECT_EQ(accounts.at("alice").version, 2);
  EXPECT_EQ(accounts.at("bob").balance, 40);
  EXPECT_EQ(accounts.at("carol").balance, 0);
  ASSERT_EQ(r.reads[5].size(), 1u);
  EXPECT_EQ(r.reads[5][0], "statement(bob,40,1,history(entry(transfer-in,40,40)))"_t);
}

std::map<std::string, bool> check_map(const ScenarioRun& run) {
  std::map<std::string, bool> out;
  for (const auto& c : run.checks()) out[c.name] = c.ok;
  return out;
}

TEST(Run, DemoScenarioPassesAllChecks) {
  ScenarioRun run(load_scenario(LOKIT_SCENARIO_DIR "/demo.scn"));
  EXPECT_TRUE(run.execute().completed);
  auto checks = check_map(run);
  EXPECT_EQ(checks.size(), 5u);
  for (const auto& [name, ok] : checks) EXPECT_TRUE(ok) << name;
  std::vector<Outcome> got;
  for (const auto& rec : run.deployment().records()) got.push_back(rec.outcome);
  EXPECT_EQ(got, (std::vector<Outcome>{Outcome::committed, Outcome::aborted_overdraft, Outcome::committed,
                                       Outcome::committed, Outcome::committed, Outcome::committed, Outcome::read}));
}

TEST(Run, FaultScenarioPassesSafetyChecks) {
  ScenarioRun run(load_scenario(LOKIT_SCENARIO_DIR "/faults.scn"));
  run.execute();
  for (const auto& c : run.checks()) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
}

TEST(Run, EmptyScenarioHasEmptyTrace) {
  ScenarioRun run(parse_scenario_text(""));
  EXPECT_TRUE(run.execute().completed);
  EXPECT_TRUE(run.trace().empty());
  EXPECT_TRUE(run.snapshot_text().empty());
}

TEST(Run, TransferIntoPermanentlySuspendedBankAborts) {
  ScenarioRun run(parse_scenario_text(
      "bank n replicas 2\nbank s replicas 2\naccount n a 100\naccount s b 5\nclient c\n"
      "suspend s-r1 at 0\nsuspend s-r2 at 0\ntrigger c transfer(n,a,60,s,b) at 1\n"));
  run.execute();
  EXPECT_EQ(run.deployment().records().at(0).outcome, Outcome::aborted);
  for (const banking::Replica* r : run.deployment().replicas_of("n")) {
    EXPECT_EQ(r->ledger().accounts.at("a").balance, 100);
  }
  for (const banking::Replica* r : run.deployment().replicas_of("s")) {
    EXPECT_EQ(r->ledger().accounts.at("b").balance, 5);
  }
}

TEST(Run, MaxEventsLeavesRunIncomplete) {
  RunOptions opts;
  opts.max_events = 3;
  ScenarioRun run(load_scenario(LOKIT_SCENARIO_DIR "/demo.scn"), opts);
  EXPECT_FALSE(run.execute().completed);
  EXPECT_FALSE(check_map(run).at("completion"));
}

TEST(Run, TraceIsDeterministicAndSeedSensitive) {
  Scenario s = load_scenario(LOKIT_SCENARIO_DIR "/demo.scn");
  auto trace = [&](std::optional<std::uint64_t> seed) {
    RunOptions o;
    o.seed = seed;
    ScenarioRun run(s, o);
    run.execute();
    return run.trace_text() + run.statements_text();
  };
  EXPECT_EQ(trace({}), trace({}));
  EXPECT_EQ(trace(3), trace(3));
  EXPECT_NE(trace(3), trace(4));
}

TEST(Property, RandomSchedulesMatchSequentialOracle) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    ScenarioRun run(parse_scenario_text(testing::random_scenario(seed, 40)));
    EXPECT_TRUE(run.execute().completed);
    for (const auto& c : run.checks()) EXPECT_TRUE(c.ok) << "seed " << seed << " " << c.name << ": " << c.detail;
  }
}

}  // namespace
}  // namespace lokit::cli
