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
#include <random>
#include <string>

namespace lokit::testing {

// Random banking scenario over banks n and s (three replicas each) with one
// client. Amounts and account names are drawn so that overdrafts, missing
// accounts and deletes all occur.
inline std::string random_scenario(std::uint64_t seed, int ops) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  const char* banks[] = {"n", "s"};
  const char* accounts[] = {"a", "b", "c"};
  std::string text = "seed " + std::to_string(seed) + "\ndelay 0.2 1.8\n";
  text += "bank n replicas 3\nbank s replicas 3\naccount n a 100\naccount n b 20\naccount s a 50\nclient c\n";
  for (int i = 0; i < ops; ++i) {
    std::string b = banks[pick(2)];
    std::string a = accounts[pick(3)];
    std::string amount = std::to_string(1 + pick(80));
    std::string t;
    switch (pick(7)) {
      case 0: t = "deposit(" + b + "," + a + "," + amount + ")"; break;
      case 1:
      case 2: t = "withdraw(" + b + "," + a + "," + amount + ")"; break;
      case 3: t = "transfer(" + b + "," + a + "," + amount + "," + banks[pick(2)] + "," + accounts[pick(3)] + ")"; break;
      case 4: t = "create(" + b + "," + a + ")"; break;
      case 5: t = "delete(" + b + "," + a + ")"; break;
      default: t = pick(2) ? "look-up(" + b + ")" : "look-up(" + b + "," + a + ")"; break;
    }
    text += "trigger c " + t + " at " + std::to_string(pick(100)) + "\n";
  }
  return text;
}

}  // namespace lokit::testing
