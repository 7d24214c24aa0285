// Copyright 2026 The ADIndRNN Authors.
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


// Brute-force reference for window layout and labels: counts annotated
// samples one by one instead of intersecting intervals.

#pragma once

#include <cstddef>
#include <vector>

#include "adindrnn/core/rng.hpp"

namespace oracle {

struct Window {
  std::size_t start = 0;
  std::size_t seizure_samples = 0;
};

struct Case {
  std::size_t total = 0;   // samples
  std::size_t len = 0;     // window length in samples
  std::vector<bool> seizure;  // per-sample flag
  std::vector<std::pair<std::size_t, std::size_t>> intervals;  // [a, b) in samples
};

inline std::vector<Window> windows(const Case& c) {
  auto count = [&](std::size_t a) {
    std::size_t n = 0;
    for (std::size_t s = a; s < a + c.len; ++s) n += c.seizure[s] ? 1 : 0;
    return n;
  };
  std::vector<Window> out;
  std::size_t a = 0;
  for (; a + c.len <= c.total; a += c.len) out.push_back({a, count(a)});
  bool tail_has_seizure = false;
  for (std::size_t s = a; s < c.total; ++s) tail_has_seizure = tail_has_seizure || c.seizure[s];
  if (a < c.total && tail_has_seizure) out.push_back({c.total - c.len, count(c.total - c.len)});
  return out;
}

// A random record of up to `max_total` samples with up to four seizures.
inline Case random_case(adindrnn::Rng& rng, std::size_t max_total) {
  Case c;
  c.total = 8 + rng.below(max_total - 7);
  c.len = 1 + rng.below(c.total);
  c.seizure.assign(c.total, false);
  const std::size_t k = rng.below(5);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k && pos + 2 < c.total; ++i) {
    const std::size_t a = pos + rng.below((c.total - pos) / 2 + 1);
    if (a + 1 >= c.total) break;
    const std::size_t b = a + 1 + rng.below(std::min<std::size_t>(c.total - a - 1, 40) + 1);
    c.intervals.emplace_back(a, b);
    for (std::size_t s = a; s < b; ++s) c.seizure[s] = true;
    pos = b;
  }
  return c;
}

}  // namespace oracle
