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
#include <numeric>
#include <sstream>

#include "lokit/scenario.hpp"

namespace lokit::cli {

namespace {

using banking::Ledger;
using banking::Outcome;

std::int64_t total_balance(const Ledger& l) {
  return std::accumulate(l.accounts.begin(), l.accounts.end(), std::int64_t{0},
                         [](std::int64_t s, const auto& kv) { return s + kv.second.balance; });
}

// Net money a committed task adds to the system.
std::int64_t committed_delta(const banking::OpRecord& rec) {
  if (rec.outcome != Outcome::committed) return 0;
  const std::string& f = rec.request.text();
  if (f == "deposit") return rec.request.arg(2).as_integer();
  if (f == "withdraw") return -rec.request.arg(2).as_integer();
  return 0;
}

}  // namespace

ScenarioRun::ScenarioRun(const Scenario& scenario, const RunOptions& options)
    : scenario_(scenario), options_(options) {
  simnet::NetPolicy policy;
  policy.seed = options_.seed.value_or(scenario_.seed);
  policy.delay_min = scenario_.delay_min;
  policy.delay_max = scenario_.delay_max;
  policy.drop_probability = scenario_.drop_probability;
  sim_ = std::make_unique<simnet::Simulation>(policy);
  sim_->world().set_trace_sink([this](const TraceRecord& rec) { trace_.push_back(format_trace_line(rec)); });

  banking::DeploymentConfig config;
  config.banks = scenario_.banks;
  config.clients = scenario_.clients;
  config.timeout = scenario_.timeout;
  deployment_ = std::make_unique<banking::Deployment>(*sim_, config);

  for (const ScheduledTrigger& t : scenario_.triggers) sim_->schedule_trigger(t.agent, t.term, t.at);
  for (const ScheduledFault& f : scenario_.faults) sim_->schedule_fault(f.cmd, f.at);
}

ScenarioRun::~ScenarioRun() = default;

simnet::RunResult ScenarioRun::execute() {
  simnet::RunLimits limits;
  limits.max_events = options_.max_events;
  result_ = sim_->advance(limits);
  executed_ = true;
  return result_;
}

std::string ScenarioRun::trace_text() const {
  std::string out;
  for (const std::string& line : trace_) {
    out += line;
    out += '\n';
  }
  return out;
}

std::string ScenarioRun::snapshot_text() const {
  std::ostringstream out;
  for (const banking::Replica* r : deployment_->replicas()) {
    out << "# replica " << r->name() << '\n';
    for (const auto& [id, a] : r->ledger().accounts) {
      out << a.bank << ' ' << a.id << ' ' << a.balance << ' ' << a.version << '\n';
    }
  }
  return out.str();
}

std::string ScenarioRun::statements_text() const {
  std::ostringstream out;
  for (const banking::Replica* r : deployment_->replicas()) {
    out << "# replica " << r->name() << '\n';
    for (const auto& [id, a] : r->ledger().accounts) {
      for (std::size_t i = 0; i < a.statements.size(); ++i) {
        const auto& e = a.statements[i];
        out << a.bank << ' ' << a.id << ' ' << i + 1 << ' ' << banking::to_string(e.kind) << ' ' << e.amount << ' '
            << e.resulting_balance << ' ' << e.correlation << '\n';
      }
    }
  }
  return out.str();
}

std::vector<CheckResult> ScenarioRun::checks() const {
  std::vector<CheckResult> out;
  const auto& records = deployment_->records();

  CheckResult completion{"completion", true, {}};
  if (!executed_ || !result_.completed) {
    completion.ok = false;
    completion.detail = "run did not reach quiescence";
  } else if (!deployment_->idle() ||
             std::any_of(records.begin(), records.end(), [](const auto& r) { return r.outcome == Outcome::pending; })) {
    completion.ok = false;
    completion.detail = "client tasks still pending";
  }
  out.push_back(completion);

  // Replicas still suspended at the end never saw their buffered requests.
  auto live = [this](const banking::Replica* r) { return !sim_->is_suspended(r->name()); };

  CheckResult convergence{"convergence", true, {}};
  for (const auto& bank : scenario_.banks) {
    const banking::Replica* first = nullptr;
    for (const banking::Replica* r : deployment_->replicas_of(bank.name)) {
      if (!live(r)) continue;
      if (first == nullptr) {
        first = r;
      } else if (!(r->ledger() == first->ledger())) {
        convergence.ok = false;
        convergence.detail += r->name() + " differs from " + first->name() + "; ";
      }
    }
  }
  out.push_back(convergence);

  CheckResult overdraft{"no-overdraft", true, {}};
  for (const banking::Replica* r : deployment_->replicas()) {
    for (const auto& [id, a] : r->ledger().accounts) {
      if (a.balance < 0) {
        overdraft.ok = false;
        overdraft.detail += r->name() + "/" + id + " is negative; ";
      }
    }
  }
  out.push_back(overdraft);

  CheckResult conservation{"conservation", true, {}};
  std::int64_t expected = 0;
  std::int64_t actual = 0;
  for (const auto& bank : scenario_.banks) {
    for (const auto& [id, balance] : bank.accounts) expected += balance;
    auto reps = deployment_->replicas_of(bank.name);
    auto pick = std::find_if(reps.begin(), reps.end(), live);
    actual += total_balance((pick == reps.end() ? reps.front() : *pick)->ledger());
  }
  for (const auto& rec : records) expected += committed_delta(rec);
  if (expected != actual) {
    conservation.ok = false;
    conservation.detail = "expected total " + std::to_string(expected) + ", found " + std::to_string(actual);
  }
  out.push_back(conservation);

  if (scenario_.fault_free() && scenario_.clients.size() <= 1) {
    CheckResult oracle{"oracle-equivalence", true, {}};
    std::vector<Term> schedule;
    for (const auto& t : scenario_.ordered_triggers()) schedule.push_back(t.term);
    OracleResult expect = replay_oracle(scenario_.banks, schedule);
    for (const banking::Replica* r : deployment_->replicas()) {
      if (!banking::same_content(r->ledger(), expect.ledgers.at(r->bank()))) {
        oracle.ok = false;
        oracle.detail += r->name() + " ledger differs; ";
      }
    }
    if (records.size() != expect.outcomes.size()) {
      oracle.ok = false;
      oracle.detail += "task count differs; ";
    } else {
      for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].outcome != expect.outcomes[i] ||
            (records[i].outcome == Outcome::read && records[i].results != expect.reads[i])) {
          oracle.ok = false;
          oracle.detail += "task " + std::to_string(i + 1) + " (" + records[i].request.to_string() +
                           ") ended " + banking::to_string(records[i].outcome) + ", expected " +
                           banking::to_string(expect.outcomes[i]) + "; ";
        }
      }
    }
    out.push_back(oracle);
  }
  return out;
}

}  // namespace lokit::cli
