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

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lokit/scenario.hpp"

namespace {

struct Flags {
  std::string scenario;
  std::string trace;
  std::string snapshot;
  bool check = false;
  std::uint64_t max_events = 0;
  std::uint64_t seed = 0;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("scenario", f.scenario, "Scenario file")->required();
  cmd->add_option("--trace", f.trace, "Write the rule-firing trace to FILE");
  cmd->add_option("--snapshot", f.snapshot, "Write the replica ledgers to FILE");
  cmd->add_flag("--check", f.check, "Run the invariant checks; exit 1 on a violation");
  cmd->add_option("--max-events", f.max_events, "Stop after N simulation events");
  cmd->add_option("--seed", f.seed, "Override the scenario seed");
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) std::cerr << "lokit: cannot write " << path << '\n';
  return static_cast<bool>(out);
}

int run(const std::string& mode, const Flags& f, const CLI::App& cmd) {
  lokit::cli::Scenario scenario;
  try {
    scenario = lokit::cli::load_scenario(f.scenario);
  } catch (const lokit::cli::ParseError& e) {
    std::cerr << f.scenario << ": " << e.what() << '\n';
    return 2;
  }

  lokit::cli::RunOptions options;
  if (cmd.count("--seed") > 0) options.seed = f.seed;
  if (cmd.count("--max-events") > 0) options.max_events = f.max_events;

  lokit::cli::ScenarioRun run(scenario, options);
  lokit::simnet::RunResult result = run.execute();

  int status = 0;
  if (!f.trace.empty()) {
    if (!write_file(f.trace, run.trace_text())) status = 1;
  } else if (mode == "run") {
    std::cout << run.trace_text();
  }
  if (!f.snapshot.empty() && !write_file(f.snapshot, run.snapshot_text())) status = 1;
  if (mode == "snapshot") std::cout << run.snapshot_text();
  if (mode == "statements") std::cout << run.statements_text();

  if (!result.completed) {
    std::cerr << "lokit: stopped after " << result.events << " events without reaching quiescence\n";
    status = 1;
  }
  if (f.check) {
    for (const auto& rec : run.deployment().records()) {
      std::cerr << "task " << rec.client << ' ' << rec.request.to_string() << ' ' << lokit::banking::to_string(rec.outcome)
                << " at " << rec.finished.to_string() << '\n';
    }
    for (const auto& c : run.checks()) {
      std::cerr << "check " << c.name << ": " << (c.ok ? "ok" : "FAIL " + c.detail) << '\n';
      if (!c.ok) status = 1;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic LO coordination kernel and replicated-bank scenario runner"};
  app.require_subcommand(1);

  Flags flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario and print its trace");
  CLI::App* snap_cmd = app.add_subcommand("snapshot", "Run a scenario and print the replica ledgers");
  CLI::App* stmt_cmd = app.add_subcommand("statements", "Run a scenario and print the statement histories");
  for (CLI::App* cmd : {run_cmd, snap_cmd, stmt_cmd}) add_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (CLI::App* cmd : {run_cmd, snap_cmd, stmt_cmd}) {
    if (cmd->parsed()) return run(cmd->get_name(), flags, *cmd);
  }
  return 2;
}
