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

#include "adindrnn/tensor.hpp"

namespace adindrnn::layers {

/// Channel attention parameters. The bias is one vector shared by every
/// (sample, time step) row so the parameter count does not depend on the
/// batch size.
template <typename T>
struct AttentionParams {
  Tensor<T> kernel;  // [channels x channels]
  Tensor<T> bias;    // [channels]

  std::size_t channels() const { return kernel.dim(0); }
};

template <typename T>
struct AttentionCache {
  Tensor<T> input;    // [N x T x C]
  Tensor<T> probs;    // per-step softmax, [N*T x C]
  Tensor<T> weights;  // time-averaged, [N x C]
};

template <typename T>
struct AttentionOutput {
  Tensor<T> output;   // [N x T x C]
  Tensor<T> weights;  // [N x C], each row sums to one
  AttentionCache<T> cache;
};

template <typename T>
struct AttentionGrads {
  Tensor<T> input;
  AttentionParams<T> params;
};

/// Channel attention over a batch of multichannel sequences.
///
/// Time steps are flattened into rows, each row goes through an affine map
/// and a softmax over channels, the per-step weights are averaged over time,
/// and the averaged weight vector scales every time step of the sample.
template <typename T>
AttentionOutput<T> attention_forward(const Tensor<T>& x,
                                     const AttentionParams<T>& p) {
  if (x.rank() != 3) {
    throw DimensionError("attention: expected [samples x steps x channels], got " +
                         shape_to_string(x.shape()));
  }
  const std::size_t n = x.dim(0), steps = x.dim(1), c = x.dim(2);
  if (p.kernel.rank() != 2 || p.kernel.dim(0) != c || p.kernel.dim(1) != c ||
      p.bias.size() != c) {
    throw DimensionError("attention: kernel " + shape_to_string(p.kernel.shape()) +
                         " does not match " + std::to_string(c) + " channels");
  }
  const std::size_t rows = n * steps;

  Tensor<T> probs({rows, c});
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(p.bias.data(), c, probs.data() + r * c);
  }
  kernels::gemm_nn(rows, c, c, x.data(), p.kernel.data(), probs.data());
  for (std::size_t r = 0; r < rows; ++r) kernels::softmax_row(probs.data() + r * c, c);

  // Running mean over time: exact when every step has the same weights,
  // which a plain sum followed by a division is not.
  Tensor<T> weights({n, c});
  for (std::size_t s = 0; s < n; ++s) {
    T* w = weights.data() + s * c;
    for (std::size_t t = 0; t < steps; ++t) {
      const T* pr = probs.data() + (s * steps + t) * c;
      const T k = T{1} / static_cast<T>(t + 1);
      for (std::size_t j = 0; j < c; ++j) w[j] += (pr[j] - w[j]) * k;
    }
  }

  Tensor<T> y({n, steps, c});
  for (std::size_t s = 0; s < n; ++s) {
    const T* w = weights.data() + s * c;
    for (std::size_t t = 0; t < steps; ++t) {
      const std::size_t off = (s * steps + t) * c;
      for (std::size_t j = 0; j < c; ++j) y[off + j] = x[off + j] * w[j];
    }
  }
  return {std::move(y), weights, AttentionCache<T>{x, std::move(probs), weights}};
}

template <typename T>
AttentionGrads<T> attention_backward(const AttentionCache<T>& cache,
                                     const AttentionParams<T>& p,
                                     const Tensor<T>& dy) {
  const Tensor<T>& x = cache.input;
  if (dy.shape() != x.shape()) {
    throw DimensionError("attention backward: gradient " +
                         shape_to_string(dy.shape()) + " vs input " +
                         shape_to_string(x.shape()));
  }
  const std::size_t n = x.dim(0), steps = x.dim(1), c = x.dim(2);
  const std::size_t rows = n * steps;

  AttentionGrads<T> g{Tensor<T>(x.shape()),
                      {Tensor<T>({c, c}), Tensor<T>({c})}};

  // Direct path through the element-wise product, and the gradient of the
  // averaged weights.
  Tensor<T> dweights({n, c});
  for (std::size_t s = 0; s < n; ++s) {
    const T* w = cache.weights.data() + s * c;
    T* dw = dweights.data() + s * c;
    for (std::size_t t = 0; t < steps; ++t) {
      const std::size_t off = (s * steps + t) * c;
      for (std::size_t j = 0; j < c; ++j) {
        g.input[off + j] = dy[off + j] * w[j];
        dw[j] += dy[off + j] * x[off + j];
      }
    }
  }

  // Copy and mean: each step's softmax receives dweights / steps. Then the
  // softmax Jacobian: dz = s * (ds - <ds, s>).
  Tensor<T> dlogits({rows, c});
  const T inv_steps = T{1} / static_cast<T>(steps);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* s = cache.probs.data() + r * c;
    const T* dw = dweights.data() + (r / steps) * c;
    T dot{0};
    for (std::size_t j = 0; j < c; ++j) dot += dw[j] * inv_steps * s[j];
    T* dz = dlogits.data() + r * c;
    for (std::size_t j = 0; j < c; ++j) dz[j] = s[j] * (dw[j] * inv_steps - dot);
  }

  kernels::gemm_tn(rows, c, c, x.data(), dlogits.data(), g.params.kernel.data());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < c; ++j) g.params.bias[j] += dlogits[r * c + j];
  }
  kernels::gemm_nt(rows, c, c, dlogits.data(), p.kernel.data(), g.input.data());
  return g;
}

}  // namespace adindrnn::layers
