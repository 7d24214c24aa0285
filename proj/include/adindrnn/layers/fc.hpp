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

template <typename T>
struct FcParams {
  Tensor<T> weights;  // [in x out]
  Tensor<T> bias;     // [out]

  std::size_t input_size() const { return weights.dim(0); }
  std::size_t output_size() const { return weights.dim(1); }
};

template <typename T>
struct FcCache {
  Tensor<T> input;
  Tensor<T> pre;
  Activation act = Activation::identity;
};

template <typename T>
struct FcOutput {
  Tensor<T> output;
  FcCache<T> cache;
};

template <typename T>
struct FcGrads {
  Tensor<T> input;
  FcParams<T> params;
};

/// y = act(x W + b) for x of shape [N x in].
template <typename T>
FcOutput<T> fc_forward(const Tensor<T>& x, const FcParams<T>& p, Activation act) {
  if (x.rank() != 2 || x.dim(1) != p.input_size()) {
    throw DimensionError("fc: input " + shape_to_string(x.shape()) +
                         " vs weights " + shape_to_string(p.weights.shape()));
  }
  const std::size_t n = x.dim(0), in = p.input_size(), out = p.output_size();
  Tensor<T> pre({n, out});
  for (std::size_t r = 0; r < n; ++r) std::copy_n(p.bias.data(), out, pre.data() + r * out);
  kernels::gemm_nn(n, in, out, x.data(), p.weights.data(), pre.data());
  Tensor<T> y({n, out});
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = activate(act, pre[i]);
  return {std::move(y), FcCache<T>{x, std::move(pre), act}};
}

template <typename T>
FcGrads<T> fc_backward(const FcCache<T>& cache, const FcParams<T>& p,
                       const Tensor<T>& dy) {
  if (dy.shape() != cache.pre.shape()) {
    throw DimensionError("fc backward: gradient " + shape_to_string(dy.shape()) +
                         " vs output " + shape_to_string(cache.pre.shape()));
  }
  const std::size_t n = cache.input.dim(0), in = p.input_size(), out = p.output_size();
  Tensor<T> dpre({n, out});
  for (std::size_t i = 0; i < dpre.size(); ++i) {
    dpre[i] = dy[i] * activate_grad(cache.act, cache.pre[i]);
  }
  FcGrads<T> g{Tensor<T>({n, in}), {Tensor<T>({in, out}), Tensor<T>({out})}};
  kernels::gemm_tn(n, in, out, cache.input.data(), dpre.data(), g.params.weights.data());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < out; ++j) g.params.bias[j] += dpre[r * out + j];
  }
  kernels::gemm_nt(n, out, in, dpre.data(), p.weights.data(), g.input.data());
  return g;
}

}  // namespace adindrnn::layers
