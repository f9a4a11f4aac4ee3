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

#include "lokit/simnet.hpp"

#include <algorithm>

namespace lokit::simnet {

namespace {

constexpr std::uint64_t kDelaySalt = 0x64656c6179ULL;  // "delay"
constexpr std::uint64_t kDropSalt = 0x64726f70ULL;     // "drop"

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // Field separator so ("ab","c") and ("a","bc") hash apart.
  h ^= 0xff;
  h *= 0x100000001b3ULL;
  return h;
}

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t link_hash(std::uint64_t seed, std::uint64_t salt, const std::string& sender, const std::string& receiver,
                        const std::string& term) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ mix(seed ^ salt);
  h = fnv1a(h, sender);
  h = fnv1a(h, receiver);
  h = fnv1a(h, term);
  return mix(h);
}

}  // namespace

SimTime NetPolicy::delay(const std::string& sender, const std::string& receiver, const std::string& term) const {
  std::int64_t lo = delay_min.ticks();
  std::int64_t hi = std::max(delay_min.ticks(), delay_max.ticks());
  if (lo == hi) return delay_min;
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  std::uint64_t h = link_hash(seed, kDelaySalt, sender, receiver, term);
  return SimTime::from_ticks(lo + static_cast<std::int64_t>(h % span));
}

bool NetPolicy::drops(const std::string& sender, const std::string& receiver, const std::string& term) const {
  if (drop_probability <= 0.0) return false;
  std::uint64_t h = link_hash(seed, kDropSalt, sender, receiver, term);
  double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < drop_probability;
}

Simulation::Simulation(NetPolicy policy) : policy_(std::move(policy)) { world_.set_environment(this); }

Simulation::~Simulation() { world_.set_environment(nullptr); }

void Simulation::enqueue(SimTime at, Payload payload) {
  if (at < now_) at = now_;
  queue_.emplace(Key{at, ++seq_}, std::move(payload));
}

int Simulation::group_of(const std::string& root) const {
  for (std::size_t i = 0; i < partition_.size(); ++i) {
    if (partition_[i].count(root)) return static_cast<int>(i);
  }
  return -1;
}

bool Simulation::separated(const std::string& root_a, const std::string& root_b) const {
  if (partition_.empty()) return false;
  return group_of(root_a) != group_of(root_b);
}

void Simulation::broadcast(const AgentState& sender, const Term& term) {
  ++stats_.broadcasts;
  const std::string text = term.to_string();
  for (const auto& [id, agent] : world_.agents()) {
    if (!agent.alive || id == sender.id) continue;
    if (separated(sender.root, agent.root)) {
      ++stats_.partitioned;
      continue;
    }
    if (policy_.drops(sender.name, agent.name, text)) {
      ++stats_.dropped;
      continue;
    }
    ++stats_.enqueued;
    enqueue(now_ + policy_.delay(sender.name, agent.name, text), Delivery{id, term});
  }
}

void Simulation::arm_timer(AgentId agent, const Term& key, SimTime delay) {
  enqueue(now_ + delay, TimerExpiry{agent, world_.agent(agent).root, key});
}

void Simulation::on_spawn(AgentId parent, AgentId child) {
  // A replica inherits whatever is still in flight to its parent.
  std::vector<Payload> clones;
  std::vector<SimTime> dues;
  for (const auto& [key, payload] : queue_) {
    if (const auto* d = std::get_if<Delivery>(&payload); d != nullptr && d->target == parent) {
      clones.emplace_back(Delivery{child, d->term});
      dues.push_back(key.due);
    }
  }
  for (std::size_t i = 0; i < clones.size(); ++i) enqueue(dues[i], std::move(clones[i]));
}

void Simulation::inject(AgentId target, const Term& term) { enqueue(now_, Delivery{target, term}); }

void Simulation::schedule_delivery(AgentId target, const Term& term, SimTime at) {
  enqueue(at, Delivery{target, term});
}

void Simulation::schedule_fault(FaultCmd cmd, SimTime at) { enqueue(at, std::move(cmd)); }

void Simulation::schedule_trigger(std::string agent, const Term& term, SimTime at) {
  enqueue(at, TriggerCmd{std::move(agent), term});
}

void Simulation::set_trigger_handler(const std::string& agent, std::function<void(const Term&)> handler) {
  trigger_handlers_[agent] = std::move(handler);
}

AgentId Simulation::require_live(const std::string& agent) const {
  auto id = world_.find(agent);
  if (!id) throw SimError("unknown agent " + agent);
  if (!world_.agent(*id).alive) throw SimError("agent " + agent + " has terminated");
  return *id;
}

void Simulation::suspend(const std::string& agent) {
  AgentId id = require_live(agent);
  suspended_.insert(agent);
  world_.set_suspended(id, true);
}

void Simulation::resume(const std::string& agent) {
  AgentId id = require_live(agent);
  if (suspended_.erase(agent) == 0) return;
  world_.set_suspended(id, false);
  auto it = buffers_.find(agent);
  if (it == buffers_.end()) return;
  for (Term& t : it->second) enqueue(now_, Delivery{id, std::move(t)});
  buffers_.erase(it);
}

void Simulation::partition(Partition groups) { partition_ = std::move(groups); }

void Simulation::heal() { partition_.clear(); }

std::size_t Simulation::buffered_count(const std::string& agent) const {
  auto it = buffers_.find(agent);
  return it == buffers_.end() ? 0 : it->second.size();
}

void Simulation::handle(const Delivery& d) {
  const AgentState& target = world_.agent(d.target);
  if (!target.alive) {
    ++stats_.discarded;
    return;
  }
  if (suspended_.count(target.name)) {
    ++stats_.buffered;
    buffers_[target.name].push_back(d.term);
    return;
  }
  ++stats_.delivered;
  world_.deliver(d.target, d.term);
}

void Simulation::handle(const TimerExpiry& t) { world_.expire_timer(t.target, t.correlation); }

void Simulation::handle(const FaultCmd& f) {
  switch (f.kind) {
    case FaultKind::suspend:
      suspend(f.agent);
      break;
    case FaultKind::resume:
      resume(f.agent);
      break;
    case FaultKind::partition:
      partition(f.groups);
      break;
    case FaultKind::heal:
      heal();
      break;
  }
}

void Simulation::handle(const TriggerCmd& t) {
  if (auto it = trigger_handlers_.find(t.agent); it != trigger_handlers_.end()) {
    it->second(t.term);
    return;
  }
  AgentId id = require_live(t.agent);
  handle(Delivery{id, Term::compound("trigger", {t.term})});
}

void Simulation::apply(const Payload& payload) {
  std::visit([this](const auto& p) { handle(p); }, payload);
}

RunResult Simulation::advance(RunLimits limits) {
  RunResult result;
  while (true) {
    std::uint64_t budget = limits.max_steps - std::min(limits.max_steps, result.steps);
    result.steps += world_.run_to_quiescence(budget);
    if (result.steps >= limits.max_steps) return result;
    if (queue_.empty()) {
      result.completed = true;
      return result;
    }
    if (result.events >= limits.max_events) return result;
    auto node = queue_.extract(queue_.begin());
    now_ = node.key().due;
    ++result.events;
    if (observer_) observer_(SimEvent{node.key().due, node.key().seq, node.mapped()});
    apply(node.mapped());
  }
}

std::vector<SimEvent> Simulation::pending() const {
  std::vector<SimEvent> out;
  out.reserve(queue_.size());
  for (const auto& [key, payload] : queue_) out.push_back(SimEvent{key.due, key.seq, payload});
  return out;
}

}  // namespace lokit::simnet
