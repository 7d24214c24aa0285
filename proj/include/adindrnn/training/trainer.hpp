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

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adindrnn/core/format.hpp"
#include "adindrnn/core/rng.hpp"
#include "adindrnn/data/segment.hpp"
#include "adindrnn/model/model.hpp"
#include "adindrnn/training/adam.hpp"
#include "adindrnn/training/config.hpp"
#include "adindrnn/training/loss.hpp"
#include "adindrnn/training/metrics.hpp"

namespace adindrnn::training {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean over the epoch's batches (cross-entropy + L2)
  std::optional<double> val_loss;
  std::optional<double> val_accuracy;
};

template <typename T>
struct TrainResult {
  model::ModelParams<T> params;  // the selected checkpoint
  std::vector<EpochRecord> curve;
  std::size_t best_epoch = 0;    // 0 means the initial parameters
  std::optional<double> best_val_accuracy;
};

struct Evaluation {
  MetricsReport metrics;
  double loss = 0.0;  // cross-entropy + L2, as in training
  std::vector<int> predictions;
};

/// Inference-mode predictions and metrics over `segments`, in batches.
template <typename T>
Evaluation evaluate(const model::ModelSpec& spec, const model::ModelParams<T>& params,
                    const std::vector<data::SegmentRef>& segments, double weight_decay,
                    std::size_t batch_size = 64) {
  if (segments.empty()) throw DataError("evaluate: no segments");
  Evaluation ev;
  model::ModelParams<T> work = params;
  double ce = 0.0;
  for (std::size_t lo = 0; lo < segments.size(); lo += batch_size) {
    const std::size_t hi = std::min(segments.size(), lo + batch_size);
    const std::vector<data::SegmentRef> batch(segments.begin() + lo, segments.begin() + hi);
    const Tensor<T> x = data::stack_segments<T>(batch);
    const std::vector<int> y = data::segment_labels(batch);
    auto fwd = model::model_forward(spec, work, x, layers::Mode::infer);
    const auto l = compute_loss(fwd.logits, y, work, 0.0);
    ce += l.data_loss * static_cast<double>(batch.size());
    for (int p : model::argmax_rows(fwd.logits)) ev.predictions.push_back(p);
  }
  ev.loss = ce / static_cast<double>(segments.size()) + l2_penalty(params, weight_decay);
  ev.metrics = compute_metrics(ev.predictions, data::segment_labels(segments));
  return ev;
}

namespace detail {

template <typename T>
void clip_recurrent(model::ModelParams<T>& p, double bound) {
  const T b = static_cast<T>(bound);
  for (auto& block : p.blocks) {
    for (auto& r : block.rnn) {
      for (auto& u : r.recurrent_weights.values()) u = std::clamp(u, -b, b);
    }
  }
}

}  // namespace detail

/// Fits a model with Adam on shuffled minibatches and keeps the parameters
/// of the epoch with the best validation accuracy (earliest on ties). With
/// no validation data the final epoch is kept. `init` replaces the seeded
/// initialization.
template <typename T>
TrainResult<T> train(const model::ModelSpec& spec, const std::vector<data::SegmentRef>& train_set,
                     const std::vector<data::SegmentRef>& val_set, const TrainConfig& cfg,
                     std::optional<model::ModelParams<T>> init = std::nullopt,
                     const std::function<void(const EpochRecord&)>& on_epoch = {}) {
  cfg.validate();
  spec.validate();
  if (train_set.empty() && cfg.epochs > 0) throw DataError("train: empty training set");

  model::ModelParams<T> params =
      init ? std::move(*init) : model::build_model<T>(spec, derive_seed(cfg.seed, 0));
  TrainResult<T> res;
  res.params = params;

  Rng rng(derive_seed(cfg.seed, 1));
  AdamState<T> adam;
  std::vector<std::size_t> order(train_set.size());

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      std::vector<data::SegmentRef> batch;
      for (std::size_t i = lo; i < hi; ++i) batch.push_back(train_set[order[i]]);
      const Tensor<T> x = data::stack_segments<T>(batch);
      const std::vector<int> y = data::segment_labels(batch);

      auto where = [&] {
        return " (epoch " + std::to_string(epoch) + ", batch " + std::to_string(batches + 1) + ")";
      };
      try {
        auto fwd = model::model_forward(spec, params, x, layers::Mode::train);
        const auto l = compute_loss(fwd.logits, y, params, cfg.weight_decay);
        auto grads = model::model_backward(params, fwd.cache, l.logit_grads);
        add_weight_decay(grads, params, cfg.weight_decay);
        std::vector<const Tensor<T>*> g;
        model::for_each_trainable(std::as_const(grads),
                                  [&](const std::string&, const Tensor<T>& t) { g.push_back(&t); });
        auto p = model::trainable_tensors(params);
        adam_step<T>(p, g, adam, cfg);
        if (spec.recurrent_clip) detail::clip_recurrent(params, *spec.recurrent_clip);
        if (!model::all_finite(params)) throw TrainingDiverged("train: non-finite parameters after update");
        loss_sum += l.loss;
      } catch (const TrainingDiverged& e) {
        throw TrainingDiverged(std::string(e.what()) + where() + ", last mean loss " +
                               (batches ? shortest(loss_sum / static_cast<double>(batches)) : "n/a"));
      }
      ++batches;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(batches);
    if (!val_set.empty()) {
      const Evaluation ev = evaluate(spec, params, val_set, cfg.weight_decay);
      rec.val_loss = ev.loss;
      rec.val_accuracy = ev.metrics.accuracy;
      if (!res.best_val_accuracy || *rec.val_accuracy > *res.best_val_accuracy) {
        res.best_val_accuracy = rec.val_accuracy;
        res.best_epoch = epoch;
        res.params = params;
      }
    } else if (epoch == cfg.epochs) {
      res.best_epoch = epoch;
      res.params = params;
    }
    res.curve.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return res;
}

}  // namespace adindrnn::training
