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

#include <optional>
#include <vector>

#include "adindrnn/layers.hpp"
#include "adindrnn/model/params.hpp"
#include "adindrnn/model/spec.hpp"

namespace adindrnn::model {

using layers::Mode;

template <typename T>
struct ComponentCache {
  layers::IndRNNCache<T> rnn;
  layers::BatchNormCache<T> bn;
};

template <typename T>
struct BlockCache {
  Shape input_shape;
  std::vector<std::size_t> output_widths;
  std::vector<ComponentCache<T>> components;
  bool dense = true;
};

template <typename T>
struct BlockOutput {
  Tensor<T> output;
  BlockCache<T> cache;
};

template <typename T>
struct BlockGrads {
  Tensor<T> input;
  BlockParams<T> params;
};

struct BlockOptions {
  bool dense = true;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::relu;
};

inline BlockOptions block_options(const ModelSpec& spec) {
  return {spec.dense, spec.hidden_activation, spec.output_activation};
}

/// Runs one block of (IndRNN, BN) components. The block output is the
/// output of the last component.
template <typename T>
BlockOutput<T> dense_block_forward(const Tensor<T>& x, BlockParams<T>& p,
                                   const BlockOptions& opt, Mode mode) {
  if (p.rnn.empty() || p.rnn.size() != p.bn.size()) {
    throw DimensionError("dense block: needs at least one (IndRNN, BN) component");
  }
  if (x.rank() != 3) {
    throw DimensionError("dense block: expected rank 3 input, got " + shape_to_string(x.shape()));
  }
  BlockCache<T> cache{x.shape(), {}, {}, opt.dense};
  std::vector<Tensor<T>> outputs;
  outputs.reserve(p.rnn.size());
  for (std::size_t i = 0; i < p.rnn.size(); ++i) {
    Tensor<T> input;
    if (i == 0) {
      input = x;
    } else if (opt.dense) {
      std::vector<const Tensor<T>*> parts{&x};
      for (const auto& o : outputs) parts.push_back(&o);
      input = concat_features(parts);
    } else {
      input = outputs.back();
    }
    auto r = layers::indrnn_forward(input, p.rnn[i], opt.hidden_activation, opt.output_activation);
    auto b = layers::batchnorm_apply(r.output, p.bn[i], mode);
    cache.output_widths.push_back(b.output.dim(2));
    cache.components.push_back({std::move(r.cache), std::move(b.cache)});
    outputs.push_back(std::move(b.output));
  }
  return {std::move(outputs.back()), std::move(cache)};
}

template <typename T>
BlockGrads<T> dense_block_backward(const BlockCache<T>& cache, const BlockParams<T>& p,
                                   const Tensor<T>& dy) {
  const std::size_t count = cache.components.size();
  BlockGrads<T> g{Tensor<T>(cache.input_shape), {}};
  g.params.rnn.resize(count);
  g.params.bn.resize(count);

  // Gradient accumulated on each component output from all its consumers.
  std::vector<Tensor<T>> doutputs(count);
  doutputs[count - 1] = dy;
  for (std::size_t i = count; i-- > 0;) {
    if (doutputs[i].empty()) continue;  // output never consumed
    auto gb = layers::batchnorm_backward(cache.components[i].bn, p.bn[i], doutputs[i]);
    auto gr = layers::indrnn_backward(cache.components[i].rnn, p.rnn[i], gb.input);
    g.params.bn[i] = std::move(gb.params);
    g.params.rnn[i] = std::move(gr.params);

    if (i == 0) {
      add_inplace(g.input, gr.input);
    } else if (cache.dense) {
      std::vector<std::size_t> widths{cache.input_shape[2]};
      for (std::size_t k = 0; k < i; ++k) widths.push_back(cache.output_widths[k]);
      auto parts = split_features(gr.input, widths);
      add_inplace(g.input, parts[0]);
      for (std::size_t k = 0; k < i; ++k) {
        if (doutputs[k].empty()) {
          doutputs[k] = std::move(parts[k + 1]);
        } else {
          add_inplace(doutputs[k], parts[k + 1]);
        }
      }
    } else {
      doutputs[i - 1] = std::move(gr.input);
    }
  }
  return g;
}

template <typename T>
struct ModelCache {
  std::optional<layers::AttentionCache<T>> attention;
  std::vector<BlockCache<T>> blocks;
  std::vector<layers::MaxPoolCache> pools;
  Shape avgpool_input;
  std::vector<layers::FcCache<T>> fc;
};

template <typename T>
struct ForwardResult {
  Tensor<T> logits;                    // [N x 2]
  std::optional<Tensor<T>> attention;  // [N x C] when the model has attention
  ModelCache<T> cache;
  std::vector<Shape> trace;            // shape after every pooling / fc stage
};

/// Full forward pass: attention (optional) -> (block, max pool) per block ->
/// average pool -> hidden FC layers -> final FC with identity activation.
/// Train mode updates BN running statistics in `params`.
template <typename T>
ForwardResult<T> model_forward(const ModelSpec& spec, ModelParams<T>& params,
                               const Tensor<T>& x, Mode mode) {
  if (x.rank() != 3 || x.dim(2) != spec.channels) {
    throw DimensionError("model: expected [samples x steps x " + std::to_string(spec.channels) +
                         "] input, got " + shape_to_string(x.shape()));
  }
  if (params.blocks.size() != spec.blocks.size() ||
      params.attention.has_value() != spec.use_attention ||
      params.fc.size() != spec.fc_sizes.size()) {
    throw DimensionError("model: parameters do not match spec " + spec.name());
  }
  spec.validate_length(x.dim(1));

  ForwardResult<T> res;
  res.trace.push_back(x.shape());
  Tensor<T> h;
  if (spec.use_attention) {
    auto a = layers::attention_forward(x, *params.attention);
    h = std::move(a.output);
    res.attention = std::move(a.weights);
    res.cache.attention = std::move(a.cache);
  } else {
    h = x;
  }

  const BlockOptions opt = block_options(spec);
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    auto blk = dense_block_forward(h, params.blocks[b], opt, mode);
    auto pool = layers::maxpool_time(blk.output, spec.pool_window, spec.pool_stride);
    res.cache.blocks.push_back(std::move(blk.cache));
    res.cache.pools.push_back(std::move(pool.cache));
    h = std::move(pool.output);
    res.trace.push_back(h.shape());
  }

  res.cache.avgpool_input = h.shape();
  h = layers::avgpool_time(h);
  res.trace.push_back(h.shape());

  for (std::size_t i = 0; i < params.fc.size(); ++i) {
    const bool last = i + 1 == params.fc.size();
    auto f = layers::fc_forward(h, params.fc[i], last ? Activation::identity : spec.fc_activation);
    res.cache.fc.push_back(std::move(f.cache));
    h = std::move(f.output);
    res.trace.push_back(h.shape());
  }
  res.logits = std::move(h);
  return res;
}

/// Gradients of every trainable tensor given dL/dlogits. Returned in a
/// ModelParams-shaped container (running statistics left empty).
template <typename T>
ModelParams<T> model_backward(const ModelParams<T>& params, const ModelCache<T>& cache,
                              const Tensor<T>& dlogits) {
  ModelParams<T> g;
  g.fc.resize(params.fc.size());
  Tensor<T> d = dlogits;
  for (std::size_t i = params.fc.size(); i-- > 0;) {
    auto gf = layers::fc_backward(cache.fc[i], params.fc[i], d);
    g.fc[i] = std::move(gf.params);
    d = std::move(gf.input);
  }
  d = layers::avgpool_time_backward(cache.avgpool_input, d);

  g.blocks.resize(params.blocks.size());
  for (std::size_t b = params.blocks.size(); b-- > 0;) {
    d = layers::maxpool_time_backward(cache.pools[b], d);
    auto gb = dense_block_backward(cache.blocks[b], params.blocks[b], d);
    g.blocks[b] = std::move(gb.params);
    d = std::move(gb.input);
  }

  if (params.attention) {
    auto ga = layers::attention_backward(*cache.attention, *params.attention, d);
    g.attention = std::move(ga.params);
  }
  return g;
}

/// Inference-mode logits; `params` is not modified.
template <typename T>
Tensor<T> model_predict(const ModelSpec& spec, const ModelParams<T>& params, const Tensor<T>& x) {
  ModelParams<T> copy = params;
  return model_forward(spec, copy, x, Mode::infer).logits;
}

/// Per-sample channel weights of the attention layer, [N x C].
template <typename T>
Tensor<T> extract_attention_weights(const ModelParams<T>& params, const Tensor<T>& x) {
  if (!params.attention) {
    throw ConfigError("extract_attention_weights: the model has no attention layer");
  }
  return layers::attention_forward(x, *params.attention).weights;
}

/// Index of the larger logit per row; ties go to class 0.
template <typename T>
std::vector<int> argmax_rows(const Tensor<T>& logits) {
  std::vector<int> out(logits.dim(0));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = logits.at(i, 1) > logits.at(i, 0) ? 1 : 0;
  }
  return out;
}

}  // namespace adindrnn::model
