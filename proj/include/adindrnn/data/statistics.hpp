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


#pragma once

#include <optional>
#include <vector>

#include "adindrnn/data/segment.hpp"

namespace adindrnn::data {

/// Seizure-segment statistics at one segment length. Percentages are over
/// seizure segments and undefined when there are none.
struct SegmentStatistics {
  double seg_len = 0.0;
  std::size_t seizure_segments = 0;
  std::optional<double> mean_seizure_seconds;
  std::optional<double> type1_percent;  // seizure_seconds <= L/4
  std::optional<double> type2_percent;  // seizure_seconds >= L/2
  std::optional<double> type3_percent;  // seizure_seconds >= 3L/4
};

inline SegmentStatistics segment_statistics(const std::vector<SegmentInfo>& segments, double seg_len) {
  SegmentStatistics s;
  s.seg_len = seg_len;
  double total = 0.0;
  std::size_t t1 = 0, t2 = 0, t3 = 0;
  for (const auto& seg : segments) {
    if (seg.label != Label::seizure) continue;
    ++s.seizure_segments;
    const double x = seg.seizure_seconds;
    total += x;
    if (x <= seg_len / 4.0) ++t1;
    if (x >= seg_len / 2.0) ++t2;
    if (x >= 3.0 * seg_len / 4.0) ++t3;
  }
  if (s.seizure_segments == 0) return s;
  const double n = static_cast<double>(s.seizure_segments);
  s.mean_seizure_seconds = total / n;
  s.type1_percent = 100.0 * static_cast<double>(t1) / n;
  s.type2_percent = 100.0 * static_cast<double>(t2) / n;
  s.type3_percent = 100.0 * static_cast<double>(t3) / n;
  return s;
}

}  // namespace adindrnn::data
