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

#include <cstdint>

#include "adindrnn/tensor.hpp"

namespace adindrnn::layers {

struct MaxPoolCache {
  Shape input_shape;
  std::vector<std::size_t> argmax;  // flat input index per output element
};

template <typename T>
struct MaxPoolOutput {
  Tensor<T> output;
  MaxPoolCache cache;
};

/// Output length of a temporal max pool; a trailing partial window is dropped.
inline std::size_t pooled_length(std::size_t steps, std::size_t window,
                                 std::size_t stride) {
  if (steps < window) return 0;
  return (steps - window) / stride + 1;
}

/// Max over windows of the time axis, per sample and feature. The first
/// maximal element wins ties.
template <typename T>
MaxPoolOutput<T> maxpool_time(const Tensor<T>& x, std::size_t window = 2,
                              std::size_t stride = 2) {
  if (x.rank() != 3) {
    throw DimensionError("maxpool: expected rank 3, got " + shape_to_string(x.shape()));
  }
  if (window == 0 || stride == 0) throw ConfigError("maxpool: window and stride must be positive");
  const std::size_t n = x.dim(0), steps = x.dim(1), f = x.dim(2);
  if (steps < window) {
    throw DimensionError("maxpool: " + std::to_string(steps) +
                         " time steps is shorter than the window of " +
                         std::to_string(window));
  }
  const std::size_t out_steps = pooled_length(steps, window, stride);
  Tensor<T> y({n, out_steps, f});
  MaxPoolCache cache{x.shape(), std::vector<std::size_t>(y.size())};
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t o = 0; o < out_steps; ++o) {
      for (std::size_t j = 0; j < f; ++j) {
        std::size_t best = (s * steps + o * stride) * f + j;
        for (std::size_t w = 1; w < window; ++w) {
          const std::size_t i = (s * steps + o * stride + w) * f + j;
          if (x[i] > x[best]) best = i;
        }
        const std::size_t out = (s * out_steps + o) * f + j;
        y[out] = x[best];
        cache.argmax[out] = best;
      }
    }
  }
  return {std::move(y), std::move(cache)};
}

template <typename T>
Tensor<T> maxpool_time_backward(const MaxPoolCache& cache, const Tensor<T>& dy) {
  if (dy.size() != cache.argmax.size()) {
    throw DimensionError("maxpool backward: gradient " + shape_to_string(dy.shape()) +
                         " does not match the cached output");
  }
  Tensor<T> dx(cache.input_shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx[cache.argmax[i]] += dy[i];
  return dx;
}

/// Mean over the time axis: [N x T x F] -> [N x F].
template <typename T>
Tensor<T> avgpool_time(const Tensor<T>& x) {
  if (x.rank() != 3) {
    throw DimensionError("avgpool: expected rank 3, got " + shape_to_string(x.shape()));
  }
  return mean_over_axis(x, 1);
}

template <typename T>
Tensor<T> avgpool_time_backward(const Shape& input_shape, const Tensor<T>& dy) {
  const std::size_t n = input_shape[0], steps = input_shape[1], f = input_shape[2];
  if (dy.rank() != 2 || dy.dim(0) != n || dy.dim(1) != f) {
    throw DimensionError("avgpool backward: gradient " + shape_to_string(dy.shape()) +
                         " vs input " + shape_to_string(input_shape));
  }
  Tensor<T> dx(input_shape);
  const T inv = T{1} / static_cast<T>(steps);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t j = 0; j < f; ++j) dx.at(s, t, j) = dy.at(s, j) * inv;
    }
  }
  return dx;
}

}  // namespace adindrnn::layers
