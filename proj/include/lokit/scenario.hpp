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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lokit/banking.hpp"
#include "lokit/simnet.hpp"

namespace lokit::cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ScheduledTrigger {
  std::string agent;
  Term term;
  SimTime at;
};

struct ScheduledFault {
  simnet::FaultCmd cmd;
  SimTime at;
};

/// A parsed scenario file. Line grammar (`#` starts a comment):
///
///   seed <n>
///   delay <min> <max>
///   drop <probability>
///   timeout <T>
///   bank <B> replicas <k>
///   account <B> <A> <balance>
///   client <C>
///   trigger <agent> <term> at <t>
///   suspend <agent> at <t>
///   resume <agent> at <t>
///   partition <a,b,...> | <c,...> at <t>
///   heal at <t>
///
/// Times are decimal seconds.
struct Scenario {
  std::uint64_t seed = 0;
  SimTime delay_min = SimTime::seconds(1);
  SimTime delay_max = SimTime::seconds(1);
  double drop_probability = 0.0;
  SimTime timeout = SimTime::seconds(5);
  std::vector<banking::BankSpec> banks;
  std::vector<std::string> clients;
  std::vector<ScheduledTrigger> triggers;
  std::vector<ScheduledFault> faults;

  /// No fault commands, no fault triggers, no drops.
  bool fault_free() const;
  /// Triggers in execution order: by time, then file order.
  std::vector<ScheduledTrigger> ordered_triggers() const;
};

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_text(const std::string& text);
/// Throws ParseError (line 0) if the file cannot be read.
Scenario load_scenario(const std::string& path);

struct OracleResult {
  std::map<std::string, banking::Ledger> ledgers;
  std::vector<banking::Outcome> outcomes;
  /// Statement terms each read returns.
  std::vector<std::vector<Term>> reads;
};

/// Sequential banking semantics over one non-replicated ledger per bank.
OracleResult replay_oracle(const std::vector<banking::BankSpec>& banks, const std::vector<Term>& schedule);

struct CheckResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::uint64_t max_events = UINT64_MAX;
};

/// Builds the deployment for a scenario, runs it and inspects the outcome.
class ScenarioRun {
 public:
  ScenarioRun(const Scenario& scenario, const RunOptions& options = {});
  ~ScenarioRun();

  simnet::RunResult execute();

  const Scenario& scenario() const { return scenario_; }
  simnet::Simulation& simulation() { return *sim_; }
  banking::Deployment& deployment() { return *deployment_; }
  const std::vector<std::string>& trace() const { return trace_; }
  std::string trace_text() const;

  /// `bank account balance version` per replica, each replica under a
  /// `# replica <name>` header.
  std::string snapshot_text() const;
  /// `bank account seq kind amount resulting_balance correlation` per replica.
  std::string statements_text() const;

  /// completion, convergence, no-overdraft, conservation and, for
  /// fault-free single-client scenarios, oracle equivalence.
  std::vector<CheckResult> checks() const;

 private:
  Scenario scenario_;
  RunOptions options_;
  std::unique_ptr<simnet::Simulation> sim_;
  std::unique_ptr<banking::Deployment> deployment_;
  std::vector<std::string> trace_;
  simnet::RunResult result_;
  bool executed_ = false;
};

}  // namespace lokit::cli
