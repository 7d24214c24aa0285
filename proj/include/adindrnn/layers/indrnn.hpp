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

#include "adindrnn/layers/activation.hpp"
#include "adindrnn/tensor.hpp"

namespace adindrnn::layers {

/// Independently recurrent layer. Each hidden unit recurs only on itself
/// through one scalar weight.
template <typename T>
struct IndRNNParams {
  Tensor<T> input_weights;      // [features x hidden]
  Tensor<T> recurrent_weights;  // [hidden]
  Tensor<T> hidden_bias;        // [hidden]
  Tensor<T> output_weights;     // [hidden x hidden]
  Tensor<T> output_bias;        // [hidden]

  std::size_t input_size() const { return input_weights.dim(0); }
  std::size_t hidden_size() const { return input_weights.dim(1); }
};

template <typename T>
struct IndRNNCache {
  Tensor<T> input;       // [N x T x F]
  Tensor<T> hidden_pre;  // [N x T x H]
  Tensor<T> hidden;      // [N x T x H], after the hidden activation
  Tensor<T> output_pre;  // [N x T x H]
  Activation hidden_act = Activation::relu;
  Activation output_act = Activation::relu;
};

template <typename T>
struct IndRNNOutput {
  Tensor<T> output;  // [N x T x H]
  IndRNNCache<T> cache;
};

template <typename T>
struct IndRNNGrads {
  Tensor<T> input;
  IndRNNParams<T> params;
};

/// h_t = act_hidden(x_t W_in + h_{t-1} * u + b_h), with h_0 = 0
/// y_t = act_out(h_t W_out + b_out)
template <typename T>
IndRNNOutput<T> indrnn_forward(const Tensor<T>& x, const IndRNNParams<T>& p,
                               Activation act_hidden, Activation act_out) {
  if (x.rank() != 3) {
    throw DimensionError("indrnn: expected [samples x steps x features], got " +
                         shape_to_string(x.shape()));
  }
  const std::size_t n = x.dim(0), steps = x.dim(1), f = x.dim(2);
  const std::size_t h = p.hidden_size();
  if (p.input_weights.dim(0) != f) {
    throw DimensionError("indrnn: input weights " +
                         shape_to_string(p.input_weights.shape()) + " vs " +
                         std::to_string(f) + " input features");
  }
  const std::size_t rows = n * steps;

  IndRNNCache<T> cache{x, Tensor<T>({n, steps, h}), Tensor<T>({n, steps, h}),
                       Tensor<T>({n, steps, h}), act_hidden, act_out};

  // Input projection for every (sample, step) at once, then the recurrence.
  T* pre = cache.hidden_pre.data();
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(p.hidden_bias.data(), h, pre + r * h);
  kernels::gemm_nn(rows, f, h, x.data(), p.input_weights.data(), pre);

  const T* u = p.recurrent_weights.data();
  T* hid = cache.hidden.data();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < steps; ++t) {
      T* cur_pre = pre + (s * steps + t) * h;
      T* cur = hid + (s * steps + t) * h;
      if (t > 0) {
        const T* prev = cur - h;
        for (std::size_t j = 0; j < h; ++j) cur_pre[j] += prev[j] * u[j];
      }
      for (std::size_t j = 0; j < h; ++j) cur[j] = activate(act_hidden, cur_pre[j]);
    }
  }

  T* out_pre = cache.output_pre.data();
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(p.output_bias.data(), h, out_pre + r * h);
  kernels::gemm_nn(rows, h, h, hid, p.output_weights.data(), out_pre);

  Tensor<T> y({n, steps, h});
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = activate(act_out, out_pre[i]);
  return {std::move(y), std::move(cache)};
}

/// Backpropagation through time; the recurrence runs in reverse.
template <typename T>
IndRNNGrads<T> indrnn_backward(const IndRNNCache<T>& cache,
                               const IndRNNParams<T>& p, const Tensor<T>& dy) {
  if (dy.shape() != cache.output_pre.shape()) {
    throw DimensionError("indrnn backward: gradient " + shape_to_string(dy.shape()) +
                         " vs output " + shape_to_string(cache.output_pre.shape()));
  }
  const std::size_t n = cache.input.dim(0), steps = cache.input.dim(1),
                    f = cache.input.dim(2);
  const std::size_t h = p.hidden_size();
  const std::size_t rows = n * steps;

  IndRNNGrads<T> g{Tensor<T>(cache.input.shape()),
                   {Tensor<T>({f, h}), Tensor<T>({h}), Tensor<T>({h}),
                    Tensor<T>({h, h}), Tensor<T>({h})}};

  Tensor<T> dout_pre({rows, h});
  for (std::size_t i = 0; i < dout_pre.size(); ++i) {
    dout_pre[i] = dy[i] * activate_grad(cache.output_act, cache.output_pre[i]);
  }
  kernels::gemm_tn(rows, h, h, cache.hidden.data(), dout_pre.data(),
                   g.params.output_weights.data());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < h; ++j) g.params.output_bias[j] += dout_pre[r * h + j];
  }

  // dh holds the gradient w.r.t. the post-activation hidden state coming
  // from the output projection; the recurrent part is added step by step.
  Tensor<T> dh({rows, h});
  kernels::gemm_nt(rows, h, h, dout_pre.data(), p.output_weights.data(), dh.data());

  Tensor<T> dhidden_pre({rows, h});
  const T* u = p.recurrent_weights.data();
  std::vector<T> carry(h);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(carry.begin(), carry.end(), T{0});
    for (std::size_t t = steps; t-- > 0;) {
      const std::size_t off = (s * steps + t) * h;
      for (std::size_t j = 0; j < h; ++j) {
        const T total = dh[off + j] + carry[j];
        const T dpre = total * activate_grad(cache.hidden_act, cache.hidden_pre[off + j]);
        dhidden_pre[off + j] = dpre;
        if (t > 0) g.params.recurrent_weights[j] += dpre * cache.hidden[off - h + j];
        carry[j] = dpre * u[j];
      }
    }
  }

  kernels::gemm_tn(rows, f, h, cache.input.data(), dhidden_pre.data(),
                   g.params.input_weights.data());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < h; ++j) g.params.hidden_bias[j] += dhidden_pre[r * h + j];
  }
  kernels::gemm_nt(rows, h, f, dhidden_pre.data(), p.input_weights.data(),
                   g.input.data());
  return g;
}

}  // namespace adindrnn::layers
