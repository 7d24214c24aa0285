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


// Fixed-length windowing of a record into labeled segments.
//
// Windows tile [0, kL) from the start of the record. A remainder shorter
// than L is dropped unless it holds seizure data, in which case the window
// [D - L, D) is appended and overlaps its predecessor. A window is a seizure
// segment iff it intersects an annotated interval for a positive length.
// Boundaries are computed in samples, so L * rate must be a whole number.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "adindrnn/data/annotations.hpp"
#include "adindrnn/data/edf.hpp"
#include "adindrnn/tensor.hpp"

namespace adindrnn::data {

enum class Label : int { nonseizure = 0, seizure = 1 };

inline const char* to_string(Label l) { return l == Label::seizure ? "seizure" : "nonseizure"; }

/// Where a segment lives and what it contains, without the samples.
struct SegmentInfo {
  std::string record_id;
  std::size_t start_sample = 0;
  std::size_t samples = 0;  // window length at the record's sampling rate
  double rate = 0.0;        // Hz
  Label label = Label::nonseizure;
  double seizure_seconds = 0.0;

  double start() const { return static_cast<double>(start_sample) / rate; }
  double length() const { return static_cast<double>(samples) / rate; }
  int label_index() const { return static_cast<int>(label); }
};

struct Segment {
  SegmentInfo info;
  Tensor<float> data;  // [steps x channels], physical units
};

using SegmentRef = std::shared_ptr<const Segment>;

/// seconds * rate as a sample count; throws ConfigError unless it is whole.
inline std::size_t samples_for(double seconds, double rate) {
  const double n = seconds * rate;
  const double r = std::round(n);
  if (!(seconds > 0.0) || !(rate > 0.0) || std::abs(n - r) > 1e-9 * std::max(1.0, n) || r < 1.0) {
    throw ConfigError("segment length " + shortest(seconds) + " s is not a whole number of samples at " +
                      shortest(rate) + " Hz");
  }
  return static_cast<std::size_t>(r);
}

/// Total length of [a, b) covered by the intervals.
inline double overlap_seconds(const std::vector<Interval>& intervals, double a, double b) {
  double total = 0.0;
  for (const auto& iv : intervals) {
    const double lo = std::max(a, iv.start), hi = std::min(b, iv.end);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

/// Window layout and labels for one record of `total_samples` samples.
inline std::vector<SegmentInfo> plan_windows(const std::string& record_id, std::size_t total_samples,
                                             double rate, double seg_len,
                                             const std::vector<Interval>& intervals) {
  const std::size_t len = samples_for(seg_len, rate);
  if (len > total_samples) {
    throw DataError("record '" + record_id + "': segment length " + shortest(seg_len) +
                    " s exceeds the record duration " +
                    shortest(static_cast<double>(total_samples) / rate) + " s");
  }
  std::vector<SegmentInfo> out;
  auto emit = [&](std::size_t start) {
    SegmentInfo s;
    s.record_id = record_id;
    s.start_sample = start;
    s.samples = len;
    s.rate = rate;
    s.seizure_seconds = overlap_seconds(intervals, static_cast<double>(start) / rate,
                                        static_cast<double>(start + len) / rate);
    s.label = s.seizure_seconds > 0.0 ? Label::seizure : Label::nonseizure;
    out.push_back(std::move(s));
  };
  const std::size_t full = total_samples / len;
  for (std::size_t k = 0; k < full; ++k) emit(k * len);
  if (total_samples % len != 0) {
    const double rem_start = static_cast<double>(full * len) / rate;
    const double end = static_cast<double>(total_samples) / rate;
    if (overlap_seconds(intervals, rem_start, end) > 0.0) emit(total_samples - len);
  }
  return out;
}

/// Positions of the requested channels in a record and their shared rate.
struct ChannelSelection {
  std::vector<std::size_t> indices;
  double rate = 0.0;
  std::size_t total_samples = 0;
};

inline ChannelSelection select_channels(const EdfRecord& rec, const std::vector<std::string>& channels) {
  if (channels.empty()) throw ConfigError("no channels selected");
  ChannelSelection sel;
  for (const auto& name : channels) {
    const auto i = rec.find_signal(name);
    if (!i) throw DataError("channel '" + name + "' is missing from the record");
    const double rate = rec.sampling_rate(*i);
    if (sel.indices.empty()) {
      sel.rate = rate;
      sel.total_samples = rec.record_count * rec.signals[*i].samples_per_record;
    } else if (rate != sel.rate) {
      throw DataError("channel '" + name + "' is sampled at " + shortest(rate) + " Hz, expected " +
                      shortest(sel.rate) + " Hz");
    }
    sel.indices.push_back(*i);
  }
  return sel;
}

/// Samples of one window in physical units, keeping every `decimate`-th
/// sample. Result is [samples / decimate x channels].
inline Tensor<float> extract_window(const EdfRecord& rec, const ChannelSelection& sel,
                                    const SegmentInfo& info, std::size_t decimate = 1) {
  if (decimate == 0 || info.samples % decimate != 0) {
    throw ConfigError("decimation factor " + std::to_string(decimate) + " does not divide " +
                      std::to_string(info.samples) + " samples");
  }
  if (info.start_sample + info.samples > sel.total_samples) {
    throw DataError("window of record '" + info.record_id + "' runs past the end of the data");
  }
  const std::size_t steps = info.samples / decimate, c = sel.indices.size();
  Tensor<float> out({steps, c});
  for (std::size_t j = 0; j < c; ++j) {
    const EdfSignal& s = rec.signals[sel.indices[j]];
    for (std::size_t t = 0; t < steps; ++t) {
      out.at(t, j) = static_cast<float>(s.to_physical(s.digital[info.start_sample + t * decimate]));
    }
  }
  return out;
}

/// Cuts a record into labeled segments over the given channels.
inline std::vector<Segment> segment_record(const EdfRecord& rec, const SeizureAnnotation& ann,
                                           double seg_len, const std::vector<std::string>& channels,
                                           std::size_t decimate = 1) {
  const ChannelSelection sel = select_channels(rec, channels);
  const double duration = static_cast<double>(sel.total_samples) / sel.rate;
  for (const auto& iv : ann.intervals) {
    if (iv.end > duration) {
      throw DataError("record '" + ann.record_id + "': seizure ends at " + shortest(iv.end) +
                      " s, after the record (" + shortest(duration) + " s)");
    }
  }
  std::vector<Segment> out;
  for (auto& info : plan_windows(ann.record_id, sel.total_samples, sel.rate, seg_len, ann.intervals)) {
    Tensor<float> data = extract_window(rec, sel, info, decimate);
    out.push_back(Segment{std::move(info), std::move(data)});
  }
  return out;
}

/// Stacks segments into a [N x steps x channels] batch.
template <typename T>
Tensor<T> stack_segments(const std::vector<SegmentRef>& segments) {
  if (segments.empty()) throw DimensionError("stack_segments: no segments");
  const Shape& s = segments.front()->data.shape();
  Tensor<T> out({segments.size(), s[0], s[1]});
  T* dst = out.data();
  for (const auto& seg : segments) {
    if (seg->data.shape() != s) {
      throw DimensionError("stack_segments: segment shape " + shape_to_string(seg->data.shape()) +
                           " differs from " + shape_to_string(s));
    }
    for (float v : seg->data.values()) *dst++ = static_cast<T>(v);
  }
  return out;
}

inline std::vector<int> segment_labels(const std::vector<SegmentRef>& segments) {
  std::vector<int> y;
  y.reserve(segments.size());
  for (const auto& s : segments) y.push_back(s->info.label_index());
  return y;
}

}  // namespace adindrnn::data
