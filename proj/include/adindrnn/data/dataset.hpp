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


// Class balancing and stratified train/validation/test splitting.

#pragma once

#include <cstdint>
#include <vector>

#include "adindrnn/core/error.hpp"
#include "adindrnn/core/rng.hpp"

namespace adindrnn::data {

struct SplitCounts {
  std::size_t train = 0, val = 0, test = 0;
};

/// round(n * percent / 100) with ties to even, in exact integer arithmetic.
inline std::size_t round_share(std::size_t n, std::size_t percent) {
  const std::size_t num = n * percent;
  std::size_t q = num / 100;
  const std::size_t r2 = 2 * (num % 100);
  if (r2 > 100 || (r2 == 100 && q % 2 == 1)) ++q;
  return q;
}

/// Per-class split of `n` items: 15% test, 15% validation, the rest train.
inline SplitCounts split_counts(std::size_t n) {
  SplitCounts c;
  c.test = round_share(n, 15);
  c.val = round_share(n, 15);
  c.train = n - c.test - c.val;
  return c;
}

template <typename Item>
struct LabeledDataset {
  std::vector<Item> train, val, test;
  SplitCounts per_class;
  std::uint64_t seed = 0;
};

/// Keeps every seizure item (S of them), draws S nonseizure items uniformly
/// without replacement, and splits each class by split_counts(S). Within a
/// split, seizure items come first. `label_of(item)` returns 0 or 1.
template <typename Item, typename LabelOf>
LabeledDataset<Item> assemble_dataset(const std::vector<Item>& pool, LabelOf label_of,
                                      std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < pool.size(); ++i) (label_of(pool[i]) == 1 ? pos : neg).push_back(i);
  if (pos.empty()) throw DataError("assemble_dataset: no seizure segments");
  if (neg.size() < pos.size()) {
    throw DataError("assemble_dataset: " + std::to_string(neg.size()) +
                    " nonseizure segments cannot balance " + std::to_string(pos.size()) +
                    " seizure segments");
  }
  Rng rng(seed);
  rng.shuffle(neg);
  neg.resize(pos.size());
  rng.shuffle(pos);

  LabeledDataset<Item> d;
  d.seed = seed;
  d.per_class = split_counts(pos.size());
  const SplitCounts& c = d.per_class;
  for (const auto* cls : {&pos, &neg}) {
    std::size_t k = 0;
    for (; k < c.test; ++k) d.test.push_back(pool[(*cls)[k]]);
    for (; k < c.test + c.val; ++k) d.val.push_back(pool[(*cls)[k]]);
    for (; k < cls->size(); ++k) d.train.push_back(pool[(*cls)[k]]);
  }
  return d;
}

}  // namespace adindrnn::data
