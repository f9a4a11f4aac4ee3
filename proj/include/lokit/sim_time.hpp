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
#include <string>
#include <string_view>

namespace lokit {

/// Simulated time in whole microseconds. Never wall-clock.
class SimTime {
 public:
  static constexpr std::int64_t kTicksPerSecond = 1'000'000;

  constexpr SimTime() = default;
  static constexpr SimTime from_ticks(std::int64_t ticks) { return SimTime(ticks); }
  static constexpr SimTime seconds(std::int64_t s) { return SimTime(s * kTicksPerSecond); }

  /// Parses a non-negative decimal number of seconds ("3", "0.25", "1.000001").
  /// Throws std::invalid_argument on malformed input or more than six decimals.
  static SimTime parse(std::string_view text);

  constexpr std::int64_t ticks() const { return ticks_; }

  /// Shortest exact decimal rendering in seconds: "3", "2.5", "0.000001".
  std::string to_string() const;

  constexpr SimTime& operator+=(SimTime other) {
    ticks_ += other.ticks_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.ticks_ + b.ticks_); }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime(a.ticks_ - b.ticks_); }
  friend constexpr auto operator<=>(SimTime, SimTime) = default;

 private:
  constexpr explicit SimTime(std::int64_t ticks) : ticks_(ticks) {}
  std::int64_t ticks_ = 0;
};

}  // namespace lokit
