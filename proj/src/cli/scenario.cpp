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
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "lokit/scenario.hpp"

namespace lokit::cli {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::string join(const std::vector<std::string>& toks, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += ' ';
    out += toks[i];
  }
  return out;
}

class LineParser {
 public:
  LineParser(Scenario& s, std::size_t line) : s_(s), line_(line) {}

  void parse(const std::vector<std::string>& t) {
    const std::string& kw = t[0];
    if (kw == "seed") {
      arity(t, 2);
      s_.seed = unsigned_int(t[1]);
    } else if (kw == "delay") {
      arity(t, 3);
      s_.delay_min = time(t[1]);
      s_.delay_max = time(t[2]);
      if (s_.delay_max < s_.delay_min) fail("delay max below min");
    } else if (kw == "drop") {
      arity(t, 2);
      s_.drop_probability = probability(t[1]);
    } else if (kw == "timeout") {
      arity(t, 2);
      s_.timeout = time(t[1]);
      if (s_.timeout.ticks() <= 0) fail("timeout must be positive");
    } else if (kw == "bank") {
      arity(t, 4);
      if (t[2] != "replicas") fail("expected: bank <B> replicas <k>");
      symbol(t[1]);
      for (const auto& b : s_.banks) {
        if (b.name == t[1]) fail("duplicate bank " + t[1]);
      }
      auto k = unsigned_int(t[3]);
      if (k < 1 || k > 1000) fail("replica count must be between 1 and 1000");
      s_.banks.push_back({t[1], static_cast<int>(k), {}});
    } else if (kw == "account") {
      arity(t, 4);
      auto bank = std::find_if(s_.banks.begin(), s_.banks.end(), [&](const auto& b) { return b.name == t[1]; });
      if (bank == s_.banks.end()) fail("account for undeclared bank " + t[1]);
      symbol(t[2]);
      for (const auto& [a, bal] : bank->accounts) {
        if (a == t[2]) fail("duplicate account " + t[2]);
      }
      auto balance = static_cast<std::int64_t>(unsigned_int(t[3]));
      bank->accounts.emplace_back(t[2], balance);
    } else if (kw == "client") {
      arity(t, 2);
      symbol(t[1]);
      if (std::count(s_.clients.begin(), s_.clients.end(), t[1])) fail("duplicate client " + t[1]);
      s_.clients.push_back(t[1]);
    } else if (kw == "trigger") {
      if (t.size() < 5 || t[t.size() - 2] != "at") fail("expected: trigger <agent> <term> at <t>");
      Term term;
      try {
        term = parse_term(join(t, 2, t.size() - 2));
        banking::validate_trigger(term);
      } catch (const std::exception& e) {
        fail(e.what());
      }
      s_.triggers.push_back({t[1], term, time(t.back())});
    } else if (kw == "suspend" || kw == "resume") {
      if (t.size() != 4 || t[2] != "at") fail("expected: " + kw + " <agent> at <t>");
      simnet::FaultCmd cmd{kw == "suspend" ? simnet::FaultKind::suspend : simnet::FaultKind::resume, t[1], {}};
      s_.faults.push_back({cmd, time(t[3])});
    } else if (kw == "partition") {
      if (t.size() < 4 || t[t.size() - 2] != "at") fail("expected: partition <group>|<group> at <t>");
      simnet::FaultCmd cmd{simnet::FaultKind::partition, {}, groups(join(t, 1, t.size() - 2))};
      s_.faults.push_back({cmd, time(t.back())});
    } else if (kw == "heal") {
      if (t.size() != 3 || t[1] != "at") fail("expected: heal at <t>");
      s_.faults.push_back({simnet::FaultCmd{simnet::FaultKind::heal, {}, {}}, time(t[2])});
    } else {
      fail("unknown directive " + kw);
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void arity(const std::vector<std::string>& t, std::size_t n) const {
    if (t.size() != n) fail("wrong number of fields for " + t[0]);
  }

  std::uint64_t unsigned_int(const std::string& s) const {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("not a non-negative integer: " + s);
    return v;
  }

  SimTime time(const std::string& s) const {
    try {
      SimTime t = SimTime::parse(s);
      if (t.ticks() < 0) fail("negative time " + s);
      return t;
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  double probability(const std::string& s) const {
    try {
      std::size_t used = 0;
      double p = std::stod(s, &used);
      if (used != s.size() || !(p >= 0.0 && p <= 1.0)) fail("probability must be in [0,1]: " + s);
      return p;
    } catch (const std::logic_error&) {
      fail("not a number: " + s);
    }
  }

  void symbol(const std::string& s) const {
    try {
      if (parse_term(s).is_atom()) return;
    } catch (const TermParseError&) {
    }
    fail("not a symbol: " + s);
  }

  simnet::Partition groups(const std::string& text) const {
    simnet::Partition out;
    std::istringstream in(text);
    for (std::string group; std::getline(in, group, '|');) {
      std::replace(group.begin(), group.end(), ',', ' ');
      auto names = split_ws(group);
      if (names.empty()) fail("empty partition group");
      out.emplace_back(names.begin(), names.end());
    }
    if (out.size() < 2) fail("a partition needs at least two groups");
    return out;
  }

  Scenario& s_;
  std::size_t line_;
};

void check_agents(const Scenario& s) {
  std::set<std::string> agents(s.clients.begin(), s.clients.end());
  for (const auto& b : s.banks) {
    for (int i = 1; i <= b.replicas; ++i) {
      if (!agents.insert(banking::Deployment::replica_name(b.name, i)).second) {
        throw ParseError(0, "agent name clash: " + banking::Deployment::replica_name(b.name, i));
      }
    }
  }
  std::set<std::string> clients(s.clients.begin(), s.clients.end());
  for (const auto& t : s.triggers) {
    if (!clients.count(t.agent)) throw ParseError(0, "trigger for undeclared client " + t.agent);
  }
  for (const auto& f : s.faults) {
    if (!f.cmd.agent.empty() && !agents.count(f.cmd.agent)) {
      throw ParseError(0, "fault for undeclared agent " + f.cmd.agent);
    }
  }
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

bool Scenario::fault_free() const {
  if (!faults.empty() || drop_probability > 0.0) return false;
  return std::none_of(triggers.begin(), triggers.end(), [](const ScheduledTrigger& t) {
    return t.term.text() == "suspend" || t.term.text() == "resume";
  });
}

std::vector<ScheduledTrigger> Scenario::ordered_triggers() const {
  std::vector<ScheduledTrigger> out = triggers;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
  return out;
}

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    LineParser(s, line_no).parse(toks);
  }
  check_agents(s);
  return s;
}

Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot read " + path);
  return parse_scenario(in);
}

}  // namespace lokit::cli
