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

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lokit/rule.hpp"
#include "lokit/sim_time.hpp"
#include "lokit/term.hpp"

namespace lokit {

/// Agents are ordered by creation; this is the canonical scan order.
struct AgentId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(AgentId, AgentId) = default;
};

struct RuleSetId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(RuleSetId, RuleSetId) = default;
};

struct AgentState {
  AgentId id;
  /// Unique display name used in traces and by the transport ("srv1", "c1#4").
  std::string name;
  /// Name of the scenario-level agent this one was &-spawned from (itself for roots).
  std::string root;
  Pool pool;
  RuleSetId ruleset;
  bool alive = true;
};

/// Result of firing one rule against one agent, before it is applied.
///
/// `groups[k]` holds the instantiated terms of rhs group k; continuation k's
/// pool is (agent pool - consumed) + groups[k] (see continuation_pool).
/// Group 0 stays on the firing agent, every further group becomes a new agent.
struct FiringEffect {
  std::vector<Term> consumed;
  std::vector<std::vector<Term>> groups;
  std::vector<Term> broadcasts;
  bool terminated = false;
};

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Searches for an injective assignment of the rule's lhs patterns to pool
/// elements (candidates in canonical order) such that all guards succeed.
std::optional<Binding> match_rule(const AgentState& state, const Rule& rule, World* world = nullptr);

/// Instantiates the rule under `binding`. Throws KernelError if an rhs or
/// emitted term is not ground.
FiringEffect fire_rule(const AgentState& state, const Rule& rule, const Binding& binding);

/// Full pool of continuation `k` of `effect` fired on `state`.
Pool continuation_pool(const AgentState& state, const FiringEffect& effect, std::size_t k);

/// What the kernel needs from its transport: time, broadcast and timers.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual SimTime now() const = 0;
  /// Hands a ^-broadcast to the transport. The sender gets no copy.
  virtual void broadcast(const AgentState& sender, const Term& term) = 0;
  /// Requests a call to World::expire_timer(agent, key) after `delay`.
  virtual void arm_timer(AgentId agent, const Term& key, SimTime delay) = 0;
  /// Called after `child` was &-spawned from `parent`.
  virtual void on_spawn(AgentId /*parent*/, AgentId /*child*/) {}
};

struct TraceRecord {
  std::uint64_t step = 0;
  SimTime time;
  std::string agent;
  std::string rule;
  std::vector<Term> consumed;
  std::vector<std::vector<Term>> produced;
  std::vector<Term> broadcasts;
  bool terminated = false;
};

/// Tab-separated: step, time, agent, rule, consumed, produced, broadcasts.
/// Term lists are space separated, rhs groups joined by " & ", empty lists
/// print as "-" and termination prints as "terminate".
std::string format_trace_line(const TraceRecord& rec);

struct StepOutcome {
  bool fired = false;
  std::string rule;
  AgentId agent;
  std::string agent_name;
};

/// The agent population plus the rule sets they run.
///
/// step() is the only thing that fires rules. Agents are scanned in id order,
/// resuming after the agent that fired last, and each agent's rules in
/// declaration order; the first match fires. Only agents whose pools changed
/// since their last failed scan are re-examined.
class World {
 public:
  World() = default;
  World(const World&) = delete;
  World& operator=(const World&) = delete;

  void set_environment(Environment* env) { env_ = env; }
  Environment* environment() const { return env_; }
  void set_trace_sink(std::function<void(const TraceRecord&)> sink) { trace_ = std::move(sink); }

  RuleSetId add_ruleset(RuleSet rules);
  const RuleSet& ruleset(RuleSetId id) const;

  /// Throws KernelError on a duplicate name or a non-ground resource.
  AgentId add_agent(const std::string& name, RuleSetId ruleset, std::span<const Term> pool = {});

  const AgentState& agent(AgentId id) const;
  std::optional<AgentId> find(std::string_view name) const;
  const std::map<AgentId, AgentState>& agents() const { return agents_; }
  std::size_t live_agent_count() const;

  /// Adds a resource to an agent's pool (a delivery). Ignored for dead agents.
  void deliver(AgentId id, const Term& term);

  /// Suspended agents are skipped by the scheduler.
  void set_suspended(AgentId id, bool suspended);
  bool is_suspended(AgentId id) const { return suspended_.count(id) > 0; }

  /// Forces an agent to be re-examined by the next step.
  void touch(AgentId id);

  StepOutcome step();
  /// Steps until quiescent or `max_steps` firings; returns the number fired.
  std::uint64_t run_to_quiescence(std::uint64_t max_steps = UINT64_MAX);
  std::uint64_t steps_taken() const { return steps_; }

  /// Fresh positive integers for GET-UNIQUE-*-ID.
  std::int64_t next_counter() { return ++counter_; }

  enum class TimerState { unarmed, armed, expired };
  TimerState timer_state(AgentId agent, const Term& key) const;
  /// Arms through the environment unless already armed.
  void arm_timer(AgentId agent, const Term& key, SimTime delay);
  void expire_timer(AgentId agent, const Term& key);

  SimTime now() const { return env_ ? env_->now() : SimTime(); }

 private:
  void apply(AgentState& agent, const Rule& rule, const FiringEffect& effect);

  std::map<AgentId, AgentState> agents_;
  std::map<std::string, AgentId, std::less<>> by_name_;
  std::vector<RuleSet> rulesets_;
  std::set<AgentId> dirty_;
  std::set<AgentId> suspended_;
  std::map<std::pair<AgentId, Term>, TimerState> timers_;
  AgentId cursor_{0};
  std::uint64_t next_agent_ = 1;
  std::uint64_t steps_ = 0;
  std::int64_t counter_ = 0;
  Environment* env_ = nullptr;
  std::function<void(const TraceRecord&)> trace_;
};

}  // namespace lokit
