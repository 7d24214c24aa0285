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


// Synthetic EEG-like data for tests, demos and the learnability check.
//
// Background activity on every channel is an alpha-band oscillation plus
// white noise. Seizure activity replaces it on the informative channels with
// a slower, larger rhythm; the other channels look the same in both classes.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adindrnn/core/rng.hpp"
#include "adindrnn/data/annotations.hpp"
#include "adindrnn/data/edf.hpp"
#include "adindrnn/data/segment.hpp"

namespace adindrnn::data {

struct SignalModel {
  double background_hz_min = 8.0, background_hz_max = 13.0;
  double background_amp_min = 15.0, background_amp_max = 25.0;  // µV
  double seizure_hz_min = 3.0, seizure_hz_max = 6.0;
  double seizure_amp_min = 40.0, seizure_amp_max = 60.0;
  double noise_sd = 10.0;
};

namespace detail {

// One channel of `steps` samples starting at sample offset `t0`.
inline void synth_channel(Rng& rng, const SignalModel& m, bool seizure, double rate,
                          std::size_t steps, float* out, std::size_t stride) {
  const double f = seizure ? rng.uniform(m.seizure_hz_min, m.seizure_hz_max)
                           : rng.uniform(m.background_hz_min, m.background_hz_max);
  const double a = seizure ? rng.uniform(m.seizure_amp_min, m.seizure_amp_max)
                           : rng.uniform(m.background_amp_min, m.background_amp_max);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (std::size_t t = 0; t < steps; ++t) {
    const double x = a * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(t) / rate + phase) +
                     m.noise_sd * rng.normal();
    out[t * stride] = static_cast<float>(x);
  }
}

}  // namespace detail

struct SyntheticSegmentsSpec {
  std::size_t count = 400;  // half of each class
  std::size_t steps = 256;
  std::size_t channels = 3;
  std::size_t informative_channels = 1;  // the first k channels carry the class signal
  double rate = 256.0;
  SignalModel signal;
  std::uint64_t seed = 0;
};

/// Balanced, interleaved segments (seizure, nonseizure, seizure, ...).
inline std::vector<SegmentRef> make_synthetic_segments(const SyntheticSegmentsSpec& spec) {
  if (spec.count == 0 || spec.steps == 0 || spec.channels == 0) {
    throw ConfigError("synthetic segments: count, steps and channels must be positive");
  }
  if (spec.informative_channels > spec.channels) {
    throw ConfigError("synthetic segments: more informative channels than channels");
  }
  Rng rng(spec.seed);
  std::vector<SegmentRef> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const bool seizure = i % 2 == 0;
    auto seg = std::make_shared<Segment>();
    seg->info.record_id = "synthetic";
    seg->info.start_sample = i * spec.steps;
    seg->info.samples = spec.steps;
    seg->info.rate = spec.rate;
    seg->info.label = seizure ? Label::seizure : Label::nonseizure;
    seg->info.seizure_seconds = seizure ? static_cast<double>(spec.steps) / spec.rate : 0.0;
    seg->data = Tensor<float>({spec.steps, spec.channels});
    for (std::size_t c = 0; c < spec.channels; ++c) {
      detail::synth_channel(rng, spec.signal, seizure && c < spec.informative_channels, spec.rate,
                            spec.steps, seg->data.data() + c, spec.channels);
    }
    out.push_back(std::move(seg));
  }
  return out;
}

struct SyntheticCorpusSpec {
  std::size_t records = 4;
  double duration = 600.0;  // seconds per record
  double rate = 64.0;       // Hz, whole samples per second
  std::size_t channels = 4;
  std::size_t informative_channels = 2;
  std::size_t seizures_per_record = 2;
  double seizure_min = 8.0, seizure_max = 40.0;  // seizure length range, seconds
  // When set, seizures start at align * k + align_offset for whole k.
  std::optional<double> align;
  double align_offset = 0.0;
  SignalModel signal;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  std::vector<std::pair<std::string, EdfRecord>> records;
  AnnotationSet annotations;
};

inline const std::vector<std::string>& bipolar_labels() {
  static const std::vector<std::string> labels{
      "FP1-F7", "F7-T7", "T7-P7", "P7-O1", "FP1-F3", "F3-C3", "C3-P3", "P3-O1", "FP2-F4",
      "F4-C4",  "C4-P4", "P4-O2", "FP2-F8", "F8-T8", "T8-P8", "P8-O2", "FZ-CZ", "CZ-PZ"};
  return labels;
}

inline SyntheticCorpusSpec synthetic_corpus_spec_from_json(const nlohmann::json& j,
                                                           SyntheticCorpusSpec s = {}) {
  s.records = j.value("records", s.records);
  s.duration = j.value("duration", s.duration);
  s.rate = j.value("rate", s.rate);
  s.channels = j.value("channels", s.channels);
  s.informative_channels = j.value("informative_channels", s.informative_channels);
  s.seizures_per_record = j.value("seizures_per_record", s.seizures_per_record);
  s.seizure_min = j.value("seizure_min", s.seizure_min);
  s.seizure_max = j.value("seizure_max", s.seizure_max);
  if (j.contains("align") && !j["align"].is_null()) s.align = j["align"].get<double>();
  s.align_offset = j.value("align_offset", s.align_offset);
  s.signal.noise_sd = j.value("noise_sd", s.signal.noise_sd);
  s.seed = j.value("seed", s.seed);
  return s;
}

/// Records named "synth01", "synth02", ... with 1-second data records and
/// a +-3276.8 µV calibration (0.1 µV per digital step).
inline SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  const std::size_t spr = samples_for(1.0, spec.rate);
  const std::size_t seconds = samples_for(spec.duration, 1.0);
  if (spec.records == 0 || spec.channels == 0 || spec.channels > bipolar_labels().size()) {
    throw ConfigError("synthetic corpus: need 1.." + std::to_string(bipolar_labels().size()) +
                      " channels and at least one record");
  }
  if (spec.informative_channels > spec.channels) {
    throw ConfigError("synthetic corpus: more informative channels than channels");
  }
  if (!(spec.seizure_min > 0.0) || spec.seizure_max < spec.seizure_min) {
    throw ConfigError("synthetic corpus: invalid seizure length range");
  }
  const double zone = spec.duration / static_cast<double>(std::max<std::size_t>(1, spec.seizures_per_record));
  if (spec.seizures_per_record > 0 && spec.seizure_max + 2.0 > zone) {
    throw ConfigError("synthetic corpus: seizures do not fit in their share of the record");
  }

  Rng rng(spec.seed);
  SyntheticCorpus corpus;
  for (std::size_t r = 0; r < spec.records; ++r) {
    char id[32];
    std::snprintf(id, sizeof(id), "synth%02zu", r + 1);

    std::vector<Interval> seizures;
    for (std::size_t k = 0; k < spec.seizures_per_record; ++k) {
      // Whole seconds keep the boundaries exact at any integral rate.
      const double len = std::round(rng.uniform(spec.seizure_min, spec.seizure_max));
      const double lo = static_cast<double>(k) * zone + 1.0;
      const double hi = static_cast<double>(k + 1) * zone - len - 1.0;
      double start = std::floor(rng.uniform(lo, hi));
      if (spec.align) {
        const double a = *spec.align;
        double s = std::ceil((lo - spec.align_offset) / a) * a + spec.align_offset;
        const double slots = std::floor((hi - s) / a);
        if (slots < 0.0) throw ConfigError("synthetic corpus: no aligned seizure position fits");
        start = s + a * static_cast<double>(rng.below(static_cast<std::uint64_t>(slots) + 1));
      }
      seizures.push_back({start, start + len});
    }

    EdfRecord rec;
    rec.patient = std::string("X ") + id;
    rec.recording = "Startdate X synthetic";
    rec.record_count = seconds;
    rec.record_duration = 1.0;
    const std::size_t total = seconds * spr;
    std::vector<float> buf(total);
    for (std::size_t c = 0; c < spec.channels; ++c) {
      EdfSignal s;
      s.label = bipolar_labels()[c];
      s.physical_dimension = "uV";
      s.physical_min = -3276.8;
      s.physical_max = 3276.7;
      s.samples_per_record = spr;
      // Piecewise: background between seizures, seizure rhythm inside them
      // on the informative channels.
      std::size_t t = 0;
      std::size_t next = 0;
      while (t < total) {
        bool in_seizure = false;
        std::size_t end = total;
        for (std::size_t k = next; k < seizures.size(); ++k) {
          const auto a = static_cast<std::size_t>(seizures[k].start * spec.rate);
          const auto b = static_cast<std::size_t>(seizures[k].end * spec.rate);
          if (t >= a && t < b) {
            in_seizure = true;
            end = b;
            next = k + 1;
          } else if (t < a) {
            end = a;
          }
          break;
        }
        const bool informative = c < spec.informative_channels;
        detail::synth_channel(rng, spec.signal, in_seizure && informative, spec.rate, end - t,
                              buf.data() + t, 1);
        t = end;
      }
      s.digital.resize(total);
      for (std::size_t i = 0; i < total; ++i) {
        const double d = std::round(static_cast<double>(buf[i]) * 10.0);
        s.digital[i] = static_cast<std::int16_t>(std::clamp(d, -32768.0, 32767.0));
      }
      rec.signals.push_back(std::move(s));
    }
    corpus.annotations.add(id, seizures);
    corpus.records.emplace_back(id, std::move(rec));
  }
  return corpus;
}

}  // namespace adindrnn::data
