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
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "adindrnn/core/rng.hpp"
#include "adindrnn/layers.hpp"
#include "adindrnn/model/spec.hpp"

namespace adindrnn::model {

template <typename T>
struct BlockParams {
  std::vector<layers::IndRNNParams<T>> rnn;
  std::vector<layers::BatchNormParams<T>> bn;
};

/// Trainable parameters (and BN running statistics) of a ModelSpec.
template <typename T>
struct ModelParams {
  std::optional<layers::AttentionParams<T>> attention;
  std::vector<BlockParams<T>> blocks;
  std::vector<layers::FcParams<T>> fc;

  template <typename U>
  ModelParams<U> cast() const;
};

namespace detail {

template <typename P, typename F>
void visit_trainable(P& p, F&& fn) {
  if (p.attention) {
    fn("attention/kernel", p.attention->kernel);
    fn("attention/bias", p.attention->bias);
  }
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    auto& block = p.blocks[b];
    for (std::size_t l = 0; l < block.rnn.size(); ++l) {
      const std::string pre = "block" + std::to_string(b) + "/layer" + std::to_string(l);
      fn(pre + "/indrnn/input_weights", block.rnn[l].input_weights);
      fn(pre + "/indrnn/recurrent_weights", block.rnn[l].recurrent_weights);
      fn(pre + "/indrnn/hidden_bias", block.rnn[l].hidden_bias);
      fn(pre + "/indrnn/output_weights", block.rnn[l].output_weights);
      fn(pre + "/indrnn/output_bias", block.rnn[l].output_bias);
      fn(pre + "/bn/gamma", block.bn[l].gamma);
      fn(pre + "/bn/beta", block.bn[l].beta);
    }
  }
  for (std::size_t i = 0; i < p.fc.size(); ++i) {
    fn("fc" + std::to_string(i) + "/weights", p.fc[i].weights);
    fn("fc" + std::to_string(i) + "/bias", p.fc[i].bias);
  }
}

template <typename P, typename F>
void visit_buffers(P& p, F&& fn) {
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    auto& block = p.blocks[b];
    for (std::size_t l = 0; l < block.bn.size(); ++l) {
      const std::string pre = "block" + std::to_string(b) + "/layer" + std::to_string(l);
      fn(pre + "/bn/running_mean", block.bn[l].running_mean);
      fn(pre + "/bn/running_var", block.bn[l].running_var);
    }
  }
}

}  // namespace detail

/// Calls fn(name, tensor) for every trainable tensor, in a fixed order.
template <typename T, typename F>
void for_each_trainable(ModelParams<T>& p, F&& fn) {
  detail::visit_trainable(p, fn);
}
template <typename T, typename F>
void for_each_trainable(const ModelParams<T>& p, F&& fn) {
  detail::visit_trainable(p, fn);
}

/// Calls fn(name, tensor) for every non-trainable buffer (BN running stats).
template <typename T, typename F>
void for_each_buffer(ModelParams<T>& p, F&& fn) {
  detail::visit_buffers(p, fn);
}
template <typename T, typename F>
void for_each_buffer(const ModelParams<T>& p, F&& fn) {
  detail::visit_buffers(p, fn);
}

template <typename T>
std::vector<Tensor<T>*> trainable_tensors(ModelParams<T>& p) {
  std::vector<Tensor<T>*> out;
  for_each_trainable(p, [&](const std::string&, Tensor<T>& t) { out.push_back(&t); });
  return out;
}

template <typename T>
std::size_t parameter_count(const ModelParams<T>& p) {
  std::size_t n = 0;
  for_each_trainable(p, [&](const std::string&, const Tensor<T>& t) { n += t.size(); });
  return n;
}

template <typename T>
bool all_finite(const ModelParams<T>& p) {
  bool ok = true;
  for_each_trainable(p, [&](const std::string&, const Tensor<T>& t) { ok = ok && t.all_finite(); });
  for_each_buffer(p, [&](const std::string&, const Tensor<T>& t) { ok = ok && t.all_finite(); });
  return ok;
}

template <typename T>
template <typename U>
ModelParams<U> ModelParams<T>::cast() const {
  ModelParams<U> out;
  if (attention) out.attention = layers::AttentionParams<U>{attention->kernel.template cast<U>(),
                                                            attention->bias.template cast<U>()};
  for (const auto& b : blocks) {
    BlockParams<U> nb;
    for (const auto& r : b.rnn) {
      nb.rnn.push_back({r.input_weights.template cast<U>(), r.recurrent_weights.template cast<U>(),
                        r.hidden_bias.template cast<U>(), r.output_weights.template cast<U>(),
                        r.output_bias.template cast<U>()});
    }
    for (const auto& n : b.bn) {
      nb.bn.push_back({n.gamma.template cast<U>(), n.beta.template cast<U>(),
                       n.running_mean.template cast<U>(), n.running_var.template cast<U>(),
                       n.epsilon, n.momentum});
    }
    out.blocks.push_back(std::move(nb));
  }
  for (const auto& f : fc) {
    out.fc.push_back({f.weights.template cast<U>(), f.bias.template cast<U>()});
  }
  return out;
}

/// Input width of every component, block by block, for a given spec.
inline std::vector<std::vector<std::size_t>> component_input_widths(const ModelSpec& spec) {
  std::vector<std::vector<std::size_t>> out;
  std::size_t block_in = spec.channels;
  for (const auto& b : spec.blocks) {
    std::vector<std::size_t> widths;
    for (std::size_t l = 0; l < b.layers; ++l) {
      if (spec.dense) {
        widths.push_back(block_in + l * b.state_size);
      } else {
        widths.push_back(l == 0 ? block_in : b.state_size);
      }
    }
    out.push_back(std::move(widths));
    block_in = b.state_size;
  }
  return out;
}

namespace detail {

template <typename T>
Tensor<T> xavier_uniform(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor<T> w({fan_in, fan_out});
  for (auto& v : w.values()) v = static_cast<T>(rng.uniform(-limit, limit));
  return w;
}

}  // namespace detail

/// Allocates and initializes parameters for `spec`. The same seed always
/// yields bit-identical parameters.
template <typename T = double>
ModelParams<T> build_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  ModelParams<T> p;

  if (spec.use_attention) {
    const std::size_t c = spec.channels;
    layers::AttentionParams<T> a{Tensor<T>({c, c}), Tensor<T>({c})};
    for (auto& v : a.kernel.values()) {
      v = static_cast<T>(rng.truncated_normal(0.0, spec.init.attention_stddev));
    }
    p.attention = std::move(a);
  }

  const auto widths = component_input_widths(spec);
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const std::size_t h = spec.blocks[b].state_size;
    BlockParams<T> block;
    for (std::size_t l = 0; l < spec.blocks[b].layers; ++l) {
      layers::IndRNNParams<T> r;
      r.input_weights = detail::xavier_uniform<T>(rng, widths[b][l], h);
      r.recurrent_weights = Tensor<T>({h});
      for (auto& v : r.recurrent_weights.values()) {
        v = static_cast<T>(rng.uniform(spec.init.recurrent_min, spec.init.recurrent_max));
      }
      r.hidden_bias = Tensor<T>({h});
      r.output_weights = detail::xavier_uniform<T>(rng, h, h);
      r.output_bias = Tensor<T>({h});
      block.rnn.push_back(std::move(r));
      block.bn.push_back(layers::BatchNormParams<T>::initial(h, spec.bn_epsilon, spec.bn_momentum));
    }
    p.blocks.push_back(std::move(block));
  }

  std::size_t in = spec.blocks.back().state_size;
  for (std::size_t out : spec.fc_sizes) {
    layers::FcParams<T> f{detail::xavier_uniform<T>(rng, in, out),
                          Tensor<T>({out}, static_cast<T>(spec.init.fc_bias))};
    p.fc.push_back(std::move(f));
    in = out;
  }
  return p;
}

/// Zero tensors with the shapes of every trainable tensor of `p`. Running
/// statistics are left empty.
template <typename T>
ModelParams<T> zeros_like(const ModelParams<T>& p) {
  ModelParams<T> z = p;
  for_each_trainable(z, [](const std::string&, Tensor<T>& t) { t.fill(T{0}); });
  for_each_buffer(z, [](const std::string&, Tensor<T>& t) { t = Tensor<T>(); });
  return z;
}

}  // namespace adindrnn::model
