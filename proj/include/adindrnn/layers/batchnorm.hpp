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

#include "adindrnn/tensor.hpp"

namespace adindrnn::layers {

enum class Mode { train, infer };

/// Batch normalization over the last axis. Statistics are pooled over every
/// other axis (samples and time steps together).
template <typename T>
struct BatchNormParams {
  Tensor<T> gamma;         // [features], trainable
  Tensor<T> beta;          // [features], trainable
  Tensor<T> running_mean;  // [features]
  Tensor<T> running_var;   // [features]
  double epsilon = 1e-5;
  double momentum = 0.9;   // running = momentum * running + (1 - momentum) * batch

  static BatchNormParams initial(std::size_t features, double epsilon = 1e-5,
                                 double momentum = 0.9) {
    return {Tensor<T>::ones({features}), Tensor<T>::zeros({features}),
            Tensor<T>::zeros({features}), Tensor<T>::ones({features}), epsilon,
            momentum};
  }

  std::size_t features() const { return gamma.size(); }
};

template <typename T>
struct BatchNormCache {
  Shape shape;
  Tensor<T> normalized;  // x_hat, same layout as the input
  Tensor<T> inv_std;     // [features]
  Mode mode = Mode::train;
};

template <typename T>
struct BatchNormOutput {
  Tensor<T> output;
  BatchNormCache<T> cache;
};

template <typename T>
struct BatchNormGrads {
  Tensor<T> input;
  BatchNormParams<T> params;  // gamma and beta only; running stats stay empty
};

/// Train mode normalizes by the batch statistics and updates the running
/// statistics of `p` in place. Infer mode uses the running statistics.
template <typename T>
BatchNormOutput<T> batchnorm_apply(const Tensor<T>& x, BatchNormParams<T>& p,
                                   Mode mode) {
  const std::size_t f = p.features();
  if (x.rank() == 0 || x.shape().back() != f) {
    throw DimensionError("batchnorm: input " + shape_to_string(x.shape()) +
                         " does not end in " + std::to_string(f) + " features");
  }
  if (!(p.epsilon > 0.0)) throw ConfigError("batchnorm: epsilon must be positive");
  const std::size_t rows = x.size() / f;

  Tensor<T> mean({f}), var({f});
  if (mode == Mode::train) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < f; ++j) mean[j] += x[r * f + j];
    }
    for (std::size_t j = 0; j < f; ++j) mean[j] /= static_cast<T>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < f; ++j) {
        const T d = x[r * f + j] - mean[j];
        var[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < f; ++j) var[j] /= static_cast<T>(rows);

    const T m = static_cast<T>(p.momentum);
    for (std::size_t j = 0; j < f; ++j) {
      p.running_mean[j] = m * p.running_mean[j] + (T{1} - m) * mean[j];
      p.running_var[j] = m * p.running_var[j] + (T{1} - m) * var[j];
    }
  } else {
    mean = p.running_mean;
    var = p.running_var;
  }

  BatchNormCache<T> cache{x.shape(), Tensor<T>(x.shape()), Tensor<T>({f}), mode};
  for (std::size_t j = 0; j < f; ++j) {
    cache.inv_std[j] = T{1} / std::sqrt(var[j] + static_cast<T>(p.epsilon));
  }
  Tensor<T> y(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < f; ++j) {
      const std::size_t i = r * f + j;
      const T xh = (x[i] - mean[j]) * cache.inv_std[j];
      cache.normalized[i] = xh;
      y[i] = p.gamma[j] * xh + p.beta[j];
    }
  }
  return {std::move(y), std::move(cache)};
}

template <typename T>
BatchNormGrads<T> batchnorm_backward(const BatchNormCache<T>& cache,
                                     const BatchNormParams<T>& p,
                                     const Tensor<T>& dy) {
  if (dy.shape() != cache.shape) {
    throw DimensionError("batchnorm backward: gradient " + shape_to_string(dy.shape()) +
                         " vs input " + shape_to_string(cache.shape));
  }
  const std::size_t f = p.features();
  const std::size_t rows = dy.size() / f;
  BatchNormGrads<T> g{Tensor<T>(cache.shape), {}};
  g.params.gamma = Tensor<T>({f});
  g.params.beta = Tensor<T>({f});

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < f; ++j) {
      const std::size_t i = r * f + j;
      g.params.gamma[j] += dy[i] * cache.normalized[i];
      g.params.beta[j] += dy[i];
    }
  }

  if (cache.mode == Mode::infer) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < f; ++j) {
        g.input[r * f + j] = dy[r * f + j] * p.gamma[j] * cache.inv_std[j];
      }
    }
    return g;
  }

  // dx = gamma * inv_std / M * (M * dy - sum(dy) - x_hat * sum(dy * x_hat))
  const T m = static_cast<T>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < f; ++j) {
      const std::size_t i = r * f + j;
      g.input[i] = p.gamma[j] * cache.inv_std[j] / m *
                   (m * dy[i] - g.params.beta[j] -
                    cache.normalized[i] * g.params.gamma[j]);
    }
  }
  return g;
}

}  // namespace adindrnn::layers
