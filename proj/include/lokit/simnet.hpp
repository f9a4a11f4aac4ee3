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
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lokit/sim_time.hpp"
#include "lokit/term.hpp"
#include "lokit/world.hpp"

namespace lokit::simnet {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Partition = std::vector<std::set<std::string>>;

/// Seeded, pure link model. Delay and drop decisions are hash functions of
/// (seed, sender, receiver, term), so a scenario replays bit-for-bit.
struct NetPolicy {
  std::uint64_t seed = 0;
  SimTime delay_min = SimTime::seconds(1);
  SimTime delay_max = SimTime::seconds(1);
  /// Off by default; scenarios opt in.
  double drop_probability = 0.0;

  SimTime delay(const std::string& sender, const std::string& receiver, const std::string& term) const;
  bool drops(const std::string& sender, const std::string& receiver, const std::string& term) const;
};

struct Delivery {
  AgentId target;
  Term term;
};

/// Wakes the WAIT guard of a timer agent.
struct TimerExpiry {
  AgentId target;
  std::string owner;
  Term correlation;
};

enum class FaultKind { suspend, resume, partition, heal };

struct FaultCmd {
  FaultKind kind = FaultKind::suspend;
  std::string agent;
  Partition groups;
};

/// A trigger from outside the agent world (user interface, scenario file).
struct TriggerCmd {
  std::string agent;
  Term term;
};

using Payload = std::variant<Delivery, TimerExpiry, FaultCmd, TriggerCmd>;

struct SimEvent {
  SimTime due;
  std::uint64_t seq = 0;
  Payload payload;
};

struct RunLimits {
  std::uint64_t max_events = UINT64_MAX;
  std::uint64_t max_steps = UINT64_MAX;
};

struct RunResult {
  std::uint64_t events = 0;
  std::uint64_t steps = 0;
  /// Queue empty and no rule matches anywhere.
  bool completed = false;
};

struct NetStats {
  std::uint64_t broadcasts = 0;
  std::uint64_t enqueued = 0;
  std::uint64_t dropped = 0;
  std::uint64_t partitioned = 0;
  std::uint64_t delivered = 0;
  std::uint64_t buffered = 0;
  /// Arrived after the target terminated.
  std::uint64_t discarded = 0;
};

/// Discrete-event transport for a World: realizes ^-broadcast over delayed,
/// reordering links, drives timers, and applies fail-stop suspension and
/// partitions. Events are processed in (due, seq) order.
class Simulation : public Environment {
 public:
  explicit Simulation(NetPolicy policy = {});
  ~Simulation() override;
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  World& world() { return world_; }
  const World& world() const { return world_; }
  const NetPolicy& policy() const { return policy_; }
  void set_policy(const NetPolicy& policy) { policy_ = policy; }

  // Environment
  SimTime now() const override { return now_; }
  void broadcast(const AgentState& sender, const Term& term) override;
  void arm_timer(AgentId agent, const Term& key, SimTime delay) override;
  void on_spawn(AgentId parent, AgentId child) override;

  /// Delivers `term` to `target` at the current time (through the queue).
  void inject(AgentId target, const Term& term);
  void schedule_delivery(AgentId target, const Term& term, SimTime at);
  void schedule_fault(FaultCmd cmd, SimTime at);
  void schedule_trigger(std::string agent, const Term& term, SimTime at);

  /// Host handler for TriggerCmds addressed to `agent`. Without one, the
  /// trigger is delivered as the resource trigger(T).
  void set_trigger_handler(const std::string& agent, std::function<void(const Term&)> handler);

  /// Throws SimError for unknown or terminated agents. Idempotent.
  void suspend(const std::string& agent);
  /// Releases buffered deliveries as immediate events, oldest first.
  void resume(const std::string& agent);
  void partition(Partition groups);
  void heal();

  bool is_suspended(const std::string& agent) const { return suspended_.count(agent) > 0; }
  const std::set<std::string>& suspended() const { return suspended_; }
  std::size_t buffered_count(const std::string& agent) const;
  const Partition& current_partition() const { return partition_; }
  /// True if the current partition separates the two root agents.
  bool separated(const std::string& root_a, const std::string& root_b) const;

  /// Runs the kernel to quiescence, then processes the earliest event, and
  /// repeats until both the queue and the world are idle or a limit is hit.
  RunResult advance(RunLimits limits = {});

  std::size_t pending_events() const { return queue_.size(); }
  std::vector<SimEvent> pending() const;
  const NetStats& stats() const { return stats_; }

  /// Called for every event right before it is applied.
  void set_event_observer(std::function<void(const SimEvent&)> observer) { observer_ = std::move(observer); }

 private:
  struct Key {
    SimTime due;
    std::uint64_t seq;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  void enqueue(SimTime at, Payload payload);
  void apply(const Payload& payload);
  void handle(const Delivery& d);
  void handle(const TimerExpiry& t);
  void handle(const FaultCmd& f);
  void handle(const TriggerCmd& t);
  AgentId require_live(const std::string& agent) const;
  int group_of(const std::string& root) const;

  World world_;
  NetPolicy policy_;
  SimTime now_;
  std::uint64_t seq_ = 0;
  std::map<Key, Payload> queue_;
  std::set<std::string> suspended_;
  std::map<std::string, std::deque<Term>> buffers_;
  Partition partition_;
  std::map<std::string, std::function<void(const Term&)>> trigger_handlers_;
  std::function<void(const SimEvent&)> observer_;
  NetStats stats_;
};

}  // namespace lokit::simnet
