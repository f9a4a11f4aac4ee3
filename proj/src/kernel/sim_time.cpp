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

#include "lokit/sim_time.hpp"

#include <cctype>
#include <stdexcept>

namespace lokit {

SimTime SimTime::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty time value");
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("malformed time '" + std::string(text) + "'");
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("malformed time '" + std::string(text) + "'");
    }
    seen_digit = true;
    if (seen_dot) {
      if (++frac_digits > 6) throw std::invalid_argument("time '" + std::string(text) + "' finer than 1us");
      frac = frac * 10 + (c - '0');
    } else {
      whole = whole * 10 + (c - '0');
      if (whole > 9'000'000'000'000) throw std::invalid_argument("time '" + std::string(text) + "' too large");
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed time '" + std::string(text) + "'");
  for (int i = frac_digits; i < 6; ++i) frac *= 10;
  return SimTime(whole * kTicksPerSecond + frac);
}

std::string SimTime::to_string() const {
  std::int64_t t = ticks_;
  std::string sign;
  if (t < 0) {
    sign = "-";
    t = -t;
  }
  std::string out = sign + std::to_string(t / kTicksPerSecond);
  std::int64_t frac = t % kTicksPerSecond;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

}  // namespace lokit
