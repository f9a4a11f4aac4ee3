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

#include "lokit/world.hpp"

#include <algorithm>
#include <sstream>

namespace lokit {

namespace {

class Matcher {
 public:
  Matcher(const AgentState& state, const Rule& rule, World* world)
      : state_(state), rule_(rule), ctx_{world, &state} {}

  std::optional<Binding> run() {
    used_.reserve(rule_.lhs.size());
    if (assign(0)) return std::move(result_);
    return std::nullopt;
  }

 private:
  bool is_used(Pool::const_iterator it) const {
    return std::find(used_.begin(), used_.end(), it) != used_.end();
  }

  bool assign(std::size_t i) {
    if (i == rule_.lhs.size()) return run_guards();
    const Term& pattern = rule_.lhs[i];
    auto [first, last] = state_.pool.candidates(pattern);
    const Term* failed = nullptr;
    for (auto it = first; it != last; ++it) {
      if (is_used(it)) continue;
      // An identical copy of a candidate that already failed at this position fails too.
      if (failed != nullptr && *failed == *it) continue;
      std::size_t mark = binding_.size();
      if (match_term(pattern, *it, binding_)) {
        used_.push_back(it);
        if (assign(i + 1)) return true;
        used_.pop_back();
      }
      binding_.truncate(mark);
      failed = &*it;
    }
    return false;
  }

  bool run_guards() {
    Binding b = binding_;
    for (bool effectful : {false, true}) {
      for (const GuardHook& g : rule_.guards) {
        if (g.effectful != effectful) continue;
        auto next = g.evaluate(b, ctx_);
        if (!next) return false;
        b = std::move(*next);
      }
    }
    result_ = std::move(b);
    return true;
  }

  const AgentState& state_;
  const Rule& rule_;
  GuardContext ctx_;
  Binding binding_;
  std::vector<Pool::const_iterator> used_;
  std::optional<Binding> result_;
};

Term ground_instance(const Term& pattern, const Binding& binding, const Rule& rule) {
  Term t = instantiate(pattern, binding);
  if (!t.is_ground()) {
    throw KernelError("rule " + rule.name + " produced non-ground term " + t.to_string());
  }
  return t;
}

std::string list_or_dash(std::span<const Term> terms) {
  return terms.empty() ? std::string("-") : join_terms(terms);
}

}  // namespace

std::optional<Binding> match_rule(const AgentState& state, const Rule& rule, World* world) {
  if (!state.alive) return std::nullopt;
  return Matcher(state, rule, world).run();
}

FiringEffect fire_rule(const AgentState& state, const Rule& rule, const Binding& binding) {
  FiringEffect effect;
  effect.consumed.reserve(rule.lhs.size());
  for (const Term& p : rule.lhs) effect.consumed.push_back(ground_instance(p, binding, rule));
  for (const auto& group : rule.rhs_groups) {
    std::vector<Term> out;
    out.reserve(group.size());
    for (const Term& p : group) out.push_back(ground_instance(p, binding, rule));
    effect.groups.push_back(std::move(out));
  }
  for (const Term& p : rule.emits) effect.broadcasts.push_back(ground_instance(p, binding, rule));
  effect.terminated = rule.terminates();
  (void)state;
  return effect;
}

Pool continuation_pool(const AgentState& state, const FiringEffect& effect, std::size_t k) {
  Pool pool = state.pool;
  for (const Term& t : effect.consumed) pool.erase_one(t);
  for (const Term& t : effect.groups.at(k)) pool.insert(t);
  return pool;
}

std::string format_trace_line(const TraceRecord& rec) {
  std::ostringstream out;
  out << rec.step << '\t' << rec.time.to_string() << '\t' << rec.agent << '\t' << rec.rule << '\t'
      << list_or_dash(rec.consumed) << '\t';
  if (rec.terminated) {
    out << "terminate";
  } else {
    for (std::size_t k = 0; k < rec.produced.size(); ++k) {
      if (k > 0) out << " & ";
      out << list_or_dash(rec.produced[k]);
    }
  }
  out << '\t' << list_or_dash(rec.broadcasts);
  return out.str();
}

RuleSetId World::add_ruleset(RuleSet rules) {
  rulesets_.push_back(std::move(rules));
  return RuleSetId{static_cast<std::uint32_t>(rulesets_.size() - 1)};
}

const RuleSet& World::ruleset(RuleSetId id) const {
  if (id.value >= rulesets_.size()) throw KernelError("unknown rule set");
  return rulesets_[id.value];
}

AgentId World::add_agent(const std::string& name, RuleSetId ruleset, std::span<const Term> pool) {
  if (name.empty()) throw KernelError("agent name must not be empty");
  if (by_name_.count(name)) throw KernelError("duplicate agent name " + name);
  (void)this->ruleset(ruleset);
  AgentState state;
  state.id = AgentId{next_agent_++};
  state.name = name;
  state.root = name;
  state.ruleset = ruleset;
  for (const Term& t : pool) {
    if (!t.is_ground()) throw KernelError("initial resource of " + name + " is not ground: " + t.to_string());
    state.pool.insert(t);
  }
  AgentId id = state.id;
  by_name_.emplace(name, id);
  agents_.emplace(id, std::move(state));
  dirty_.insert(id);
  return id;
}

const AgentState& World::agent(AgentId id) const {
  auto it = agents_.find(id);
  if (it == agents_.end()) throw KernelError("unknown agent id " + std::to_string(id.value));
  return it->second;
}

std::optional<AgentId> World::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t World::live_agent_count() const {
  return static_cast<std::size_t>(
      std::count_if(agents_.begin(), agents_.end(), [](const auto& kv) { return kv.second.alive; }));
}

void World::deliver(AgentId id, const Term& term) {
  auto it = agents_.find(id);
  if (it == agents_.end() || !it->second.alive) return;
  it->second.pool.insert(term);
  dirty_.insert(id);
}

void World::set_suspended(AgentId id, bool suspended) {
  if (suspended) {
    suspended_.insert(id);
  } else if (suspended_.erase(id) > 0) {
    dirty_.insert(id);
  }
}

void World::touch(AgentId id) {
  auto it = agents_.find(id);
  if (it != agents_.end() && it->second.alive) dirty_.insert(id);
}

StepOutcome World::step() {
  if (dirty_.empty()) return {};
  std::vector<AgentId> order;
  order.reserve(dirty_.size());
  for (auto it = dirty_.upper_bound(cursor_); it != dirty_.end(); ++it) order.push_back(*it);
  for (auto it = dirty_.begin(); it != dirty_.end() && *it <= cursor_; ++it) order.push_back(*it);

  for (AgentId id : order) {
    AgentState& agent = agents_.at(id);
    if (!agent.alive || suspended_.count(id)) {
      dirty_.erase(id);
      continue;
    }
    for (const Rule& rule : ruleset(agent.ruleset).rules()) {
      auto binding = match_rule(agent, rule, this);
      if (!binding) continue;
      FiringEffect effect = fire_rule(agent, rule, *binding);
      cursor_ = id;
      StepOutcome out{true, rule.name, id, agent.name};
      apply(agent, rule, effect);
      return out;
    }
    dirty_.erase(id);
  }
  return {};
}

std::uint64_t World::run_to_quiescence(std::uint64_t max_steps) {
  std::uint64_t fired = 0;
  while (fired < max_steps && step().fired) ++fired;
  return fired;
}

void World::apply(AgentState& agent, const Rule& rule, const FiringEffect& effect) {
  for (const Term& t : effect.consumed) {
    if (!agent.pool.erase_one(t)) {
      throw KernelError("rule " + rule.name + " consumed " + t.to_string() + " absent from " + agent.name);
    }
  }
  ++steps_;
  if (trace_) {
    TraceRecord rec{steps_, now(), agent.name, rule.name, effect.consumed, effect.groups, effect.broadcasts,
                    effect.terminated};
    trace_(rec);
  }
  if (env_) {
    for (const Term& t : effect.broadcasts) env_->broadcast(agent, t);
  }
  if (effect.terminated) {
    agent.pool.clear();
    agent.alive = false;
    dirty_.erase(agent.id);
    return;
  }
  for (std::size_t k = 1; k < effect.groups.size(); ++k) {
    AgentState child;
    child.id = AgentId{next_agent_++};
    child.name = agent.root + "#" + std::to_string(child.id.value);
    child.root = agent.root;
    child.ruleset = agent.ruleset;
    child.pool = agent.pool;
    for (const Term& t : effect.groups[k]) child.pool.insert(t);
    AgentId cid = child.id;
    by_name_.emplace(child.name, cid);
    agents_.emplace(cid, std::move(child));
    dirty_.insert(cid);
    if (env_) env_->on_spawn(agent.id, cid);
  }
  for (const Term& t : effect.groups.front()) agent.pool.insert(t);
  dirty_.insert(agent.id);
}

World::TimerState World::timer_state(AgentId agent, const Term& key) const {
  auto it = timers_.find({agent, key});
  return it == timers_.end() ? TimerState::unarmed : it->second;
}

void World::arm_timer(AgentId agent, const Term& key, SimTime delay) {
  auto [it, inserted] = timers_.try_emplace({agent, key}, TimerState::armed);
  if (!inserted) return;
  if (!env_) throw KernelError("timer armed without an environment");
  env_->arm_timer(agent, key, delay);
}

void World::expire_timer(AgentId agent, const Term& key) {
  timers_[{agent, key}] = TimerState::expired;
  touch(agent);
}

}  // namespace lokit
