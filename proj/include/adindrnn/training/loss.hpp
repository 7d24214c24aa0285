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

#include <cmath>
#include <span>

#include "adindrnn/model/params.hpp"

namespace adindrnn::training {

template <typename T>
struct LossResult {
  double loss = 0.0;        // data_loss + l2_loss
  double data_loss = 0.0;   // mean softmax cross-entropy
  double l2_loss = 0.0;     // weight_decay * sum(theta^2) / 2
  Tensor<T> logit_grads;    // d(data_loss)/d(logits), [N x 2]
};

/// weight_decay * sum over all trainable tensors of |theta|^2 / 2.
template <typename T>
double l2_penalty(const model::ModelParams<T>& params, double weight_decay) {
  double sum = 0.0;
  model::for_each_trainable(params, [&](const std::string&, const Tensor<T>& t) {
    for (T v : t.values()) sum += static_cast<double>(v) * static_cast<double>(v);
  });
  return weight_decay * 0.5 * sum;
}

/// Mean two-class softmax cross-entropy plus the L2 penalty. The returned
/// gradient covers the cross-entropy term only; the penalty's gradient
/// (weight_decay * theta) is added by add_weight_decay.
template <typename T>
LossResult<T> compute_loss(const Tensor<T>& logits, std::span<const int> labels,
                           const model::ModelParams<T>& params, double weight_decay) {
  if (logits.rank() != 2 || logits.dim(1) != 2 || logits.dim(0) != labels.size()) {
    throw DimensionError("loss: logits " + shape_to_string(logits.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  if (!logits.all_finite()) throw TrainingDiverged("loss: non-finite logits");
  const std::size_t n = labels.size();
  LossResult<T> r;
  r.logit_grads = Tensor<T>(logits.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw DataError("loss: label " + std::to_string(labels[i]) + " is not 0 or 1");
    }
    const double a = logits.at(i, 0), b = logits.at(i, 1);
    const double mx = std::max(a, b);
    const double lse = mx + std::log(std::exp(a - mx) + std::exp(b - mx));
    const double p0 = std::exp(a - lse), p1 = std::exp(b - lse);
    total += lse - (labels[i] == 0 ? a : b);
    r.logit_grads.at(i, 0) = static_cast<T>((p0 - (labels[i] == 0 ? 1.0 : 0.0)) / n);
    r.logit_grads.at(i, 1) = static_cast<T>((p1 - (labels[i] == 1 ? 1.0 : 0.0)) / n);
  }
  r.data_loss = total / static_cast<double>(n);
  r.l2_loss = l2_penalty(params, weight_decay);
  r.loss = r.data_loss + r.l2_loss;
  if (!std::isfinite(r.loss)) throw TrainingDiverged("loss: non-finite value");
  return r;
}

/// grads += weight_decay * params, tensor by tensor.
template <typename T>
void add_weight_decay(model::ModelParams<T>& grads, const model::ModelParams<T>& params,
                      double weight_decay) {
  if (weight_decay == 0.0) return;
  std::vector<const Tensor<T>*> src;
  model::for_each_trainable(params, [&](const std::string&, const Tensor<T>& t) { src.push_back(&t); });
  std::size_t i = 0;
  const T wd = static_cast<T>(weight_decay);
  model::for_each_trainable(grads, [&](const std::string& name, Tensor<T>& g) {
    const Tensor<T>& p = *src.at(i++);
    if (p.shape() != g.shape()) {
      throw DimensionError("weight decay: gradient " + name + " has shape " +
                           shape_to_string(g.shape()));
    }
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += wd * p[k];
  });
}

}  // namespace adindrnn::training
