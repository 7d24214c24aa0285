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

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adindrnn/core/error.hpp"

namespace adindrnn::training {

/// A metric whose denominator is zero has no value (std::nullopt) rather
/// than 0 or 1.
using Metric = std::optional<double>;

/// Seizure (label 1) is the positive class.
struct MetricsReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  Metric sensitivity, specificity, precision, f1, accuracy;

  std::size_t total() const { return tp + fp + tn + fn; }

  /// Metric columns in table order: Sens., Spec., F1, Prec., Acc.
  std::array<Metric, 5> columns() const {
    return {sensitivity, specificity, f1, precision, accuracy};
  }

  static MetricsReport from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                   std::size_t fn) {
    MetricsReport r{tp, fp, tn, fn, {}, {}, {}, {}, {}};
    auto ratio = [](std::size_t num, std::size_t den) -> Metric {
      if (den == 0) return std::nullopt;
      return static_cast<double>(num) / static_cast<double>(den);
    };
    r.sensitivity = ratio(tp, tp + fn);
    r.specificity = ratio(tn, tn + fp);
    r.precision = ratio(tp, tp + fp);
    r.accuracy = ratio(tp + tn, r.total());
    if (r.precision && r.sensitivity && (*r.precision + *r.sensitivity) > 0.0) {
      r.f1 = 2.0 * *r.precision * *r.sensitivity / (*r.precision + *r.sensitivity);
    }
    return r;
  }

  /// A row known only by its metric values (no counts).
  static MetricsReport from_values(double sens, double spec, double f1, double prec,
                                   double acc) {
    MetricsReport r;
    r.sensitivity = sens;
    r.specificity = spec;
    r.f1 = f1;
    r.precision = prec;
    r.accuracy = acc;
    return r;
  }
};

inline const std::array<const char*, 5>& metric_names() {
  static const std::array<const char*, 5> names{"sensitivity", "specificity", "f1",
                                                "precision", "accuracy"};
  return names;
}

/// Confusion-matrix metrics of binary predictions against labels.
inline MetricsReport compute_metrics(std::span<const int> predictions,
                                     std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw DimensionError("metrics: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(labels.size()) + " labels");
  }
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i], p = predictions[i];
    if ((y != 0 && y != 1) || (p != 0 && p != 1)) {
      throw DataError("metrics: values must be 0 or 1");
    }
    if (y == 1) {
      (p == 1 ? tp : fn)++;
    } else {
      (p == 1 ? fp : tn)++;
    }
  }
  return MetricsReport::from_counts(tp, fp, tn, fn);
}

struct MetricSummary {
  Metric mean;
  Metric stddev;         // population standard deviation (divide by N)
  std::size_t defined = 0;  // rounds that contributed
};

struct CvSummary {
  std::vector<MetricsReport> rounds;
  std::array<MetricSummary, 5> metrics;  // same order as MetricsReport::columns()

  const MetricSummary& sensitivity() const { return metrics[0]; }
  const MetricSummary& specificity() const { return metrics[1]; }
  const MetricSummary& f1() const { return metrics[2]; }
  const MetricSummary& precision() const { return metrics[3]; }
  const MetricSummary& accuracy() const { return metrics[4]; }
};

/// Mean and population standard deviation of every metric across rounds.
/// Rounds where a metric is undefined are left out of that metric only.
inline CvSummary aggregate_cv(std::vector<MetricsReport> rounds) {
  if (rounds.empty()) throw DataError("aggregate_cv: no rounds to aggregate");
  CvSummary s;
  for (std::size_t m = 0; m < 5; ++m) {
    std::vector<double> vals;
    for (const auto& r : rounds) {
      if (auto v = r.columns()[m]) vals.push_back(*v);
    }
    MetricSummary& out = s.metrics[m];
    out.defined = vals.size();
    if (vals.empty()) continue;
    double sum = 0.0;
    for (double v : vals) sum += v;
    const double mean = sum / static_cast<double>(vals.size());
    double sq = 0.0;
    for (double v : vals) sq += (v - mean) * (v - mean);
    out.mean = mean;
    out.stddev = std::sqrt(sq / static_cast<double>(vals.size()));
  }
  s.rounds = std::move(rounds);
  return s;
}

}  // namespace adindrnn::training
