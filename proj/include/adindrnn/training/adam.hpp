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
#include <cstdint>
#include <span>
#include <vector>

#include "adindrnn/tensor.hpp"
#include "adindrnn/training/config.hpp"

namespace adindrnn::training {

template <typename T>
struct AdamState {
  std::vector<Tensor<T>> first;   // moment estimates, one per parameter
  std::vector<Tensor<T>> second;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update over a list of parameter tensors. Moments
/// are allocated on the first call.
template <typename T>
void adam_step(std::span<Tensor<T>* const> params, std::span<const Tensor<T>* const> grads,
               AdamState<T>& state, const TrainConfig& cfg) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam: " + std::to_string(params.size()) + " parameters vs " +
                         std::to_string(grads.size()) + " gradients");
  }
  if (state.first.empty()) {
    for (const auto* p : params) {
      state.first.emplace_back(p->shape());
      state.second.emplace_back(p->shape());
    }
  }
  if (state.first.size() != params.size()) {
    throw DimensionError("adam: state tracks " + std::to_string(state.first.size()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i]->shape() || params[i]->shape() != state.first[i].shape()) {
      throw DimensionError("adam: parameter " + std::to_string(i) + " shape " +
                           shape_to_string(params[i]->shape()) + " vs gradient " +
                           shape_to_string(grads[i]->shape()));
    }
  }

  ++state.step;
  const double b1 = cfg.beta1, b2 = cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    const Tensor<T>& g = *grads[i];
    Tensor<T>& m = state.first[i];
    Tensor<T>& v = state.second[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double gk = g[k];
      const double mk = b1 * m[k] + (1.0 - b1) * gk;
      const double vk = b2 * v[k] + (1.0 - b2) * gk * gk;
      m[k] = static_cast<T>(mk);
      v[k] = static_cast<T>(vk);
      const double update = cfg.learning_rate * (mk / c1) / (std::sqrt(vk / c2) + cfg.epsilon);
      p[k] = static_cast<T>(p[k] - update);
    }
  }
}

}  // namespace adindrnn::training
