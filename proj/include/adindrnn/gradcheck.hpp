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


// Central finite-difference checks of every layer's backward pass and of a
// small end-to-end model, in double precision.
//
// Each check contracts the layer output with a fixed random tensor to get a
// scalar, perturbs one coordinate at a time by +-h and compares the slope to
// the analytic gradient. ReLU and max pooling are piecewise linear, so a
// coordinate whose perturbation flips any activation sign or pooling winner
// is not differentiable there; it is counted as skipped instead of compared.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "adindrnn/core/rng.hpp"
#include "adindrnn/model/model.hpp"
#include "adindrnn/training/loss.hpp"

namespace adindrnn::gradcheck {

inline constexpr double kStep = 1e-5;
inline constexpr double kTolerance = 1e-5;
// Gradients smaller than this are compared in absolute terms.
inline constexpr double kFloor = 1e-4;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kFloor});
}

struct Result {
  std::string name;
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;
  std::string worst;  // coordinate with the largest error
  std::size_t checked = 0;
  std::size_t skipped = 0;

  bool passed(double tol = kTolerance) const { return checked > 0 && max_rel_error < tol; }
};

// Scalar objective plus the on/off pattern of every kink it passes through.
struct Probe {
  double value = 0.0;
  std::vector<std::uint64_t> pattern;
};

namespace detail {

using D = double;

inline Tensor<D> random_tensor(Rng& rng, Shape shape, double sd = 1.0) {
  Tensor<D> t(std::move(shape));
  for (auto& v : t.values()) v = rng.normal(0.0, sd);
  return t;
}

inline double dot(const Tensor<D>& a, const Tensor<D>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void append_signs(std::vector<std::uint64_t>& out, const Tensor<D>& pre) {
  for (D v : pre.values()) out.push_back(v > 0.0 ? 1 : 0);
}

inline void append_argmax(std::vector<std::uint64_t>& out, const layers::MaxPoolCache& c) {
  for (std::size_t i : c.argmax) out.push_back(i);
}

/// Compares `analytic` with central differences of `probe` over `t`.
inline void compare(Result& r, const std::string& name, Tensor<D>& t, const Tensor<D>& analytic,
                    const std::function<Probe()>& probe) {
  if (analytic.shape() != t.shape()) {
    throw DimensionError("gradcheck: gradient of " + name + " has shape " +
                         shape_to_string(analytic.shape()) + ", expected " + shape_to_string(t.shape()));
  }
  const auto base = probe().pattern;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const D orig = t[i];
    t[i] = orig + kStep;
    const Probe plus = probe();
    t[i] = orig - kStep;
    const Probe minus = probe();
    t[i] = orig;
    if (plus.pattern != base || minus.pattern != base) {
      ++r.skipped;
      continue;
    }
    const double numeric = (plus.value - minus.value) / (2.0 * kStep);
    const double err = relative_error(analytic[i], numeric);
    ++r.checked;
    if (err >= r.max_rel_error) {
      r.max_rel_error = err;
      r.worst = name + "[" + std::to_string(i) + "]";
    }
  }
}

}  // namespace detail

inline Result check_attention(std::uint64_t seed) {
  using namespace detail;
  Rng rng(seed);
  const std::size_t n = 3, steps = 5, c = 4;
  Tensor<D> x = random_tensor(rng, {n, steps, c});
  layers::AttentionParams<D> p{random_tensor(rng, {c, c}, 0.5), random_tensor(rng, {c}, 0.5)};
  const Tensor<D> dy = random_tensor(rng, {n, steps, c});

  auto fwd = layers::attention_forward(x, p);
  const auto g = layers::attention_backward(fwd.cache, p, dy);
  auto probe = [&] { return Probe{dot(layers::attention_forward(x, p).output, dy), {}}; };

  Result r;
  r.name = "attention";
  r.seed = seed;
  compare(r, "input", x, g.input, probe);
  compare(r, "kernel", p.kernel, g.params.kernel, probe);
  compare(r, "bias", p.bias, g.params.bias, probe);
  return r;
}

inline Result check_indrnn(std::uint64_t seed) {
  using namespace detail;
  Rng rng(seed);
  const std::size_t n = 2, steps = 6, f = 3, h = 4;
  Tensor<D> x = random_tensor(rng, {n, steps, f});
  layers::IndRNNParams<D> p;
  p.input_weights = random_tensor(rng, {f, h}, 0.6);
  p.recurrent_weights = Tensor<D>({h});
  for (auto& u : p.recurrent_weights.values()) u = rng.uniform(0.0, 1.0);
  p.hidden_bias = random_tensor(rng, {h}, 0.3);
  p.output_weights = random_tensor(rng, {h, h}, 0.6);
  p.output_bias = random_tensor(rng, {h}, 0.3);
  const Tensor<D> dy = random_tensor(rng, {n, steps, h});

  auto run = [&] { return layers::indrnn_forward(x, p, layers::Activation::relu, layers::Activation::relu); };
  const auto g = layers::indrnn_backward(run().cache, p, dy);
  auto probe = [&] {
    auto o = run();
    Probe pr{dot(o.output, dy), {}};
    append_signs(pr.pattern, o.cache.hidden_pre);
    append_signs(pr.pattern, o.cache.output_pre);
    return pr;
  };

  Result r;
  r.name = "indrnn";
  r.seed = seed;
  compare(r, "input", x, g.input, probe);
  compare(r, "input_weights", p.input_weights, g.params.input_weights, probe);
  compare(r, "recurrent_weights", p.recurrent_weights, g.params.recurrent_weights, probe);
  compare(r, "hidden_bias", p.hidden_bias, g.params.hidden_bias, probe);
  compare(r, "output_weights", p.output_weights, g.params.output_weights, probe);
  compare(r, "output_bias", p.output_bias, g.params.output_bias, probe);
  return r;
}

inline Result check_batchnorm(std::uint64_t seed) {
  using namespace detail;
  Rng rng(seed);
  const std::size_t n = 3, steps = 4, f = 3;
  Tensor<D> x = random_tensor(rng, {n, steps, f}, 2.0);
  auto p = layers::BatchNormParams<D>::initial(f, 1e-5, 0.9);
  p.gamma = random_tensor(rng, {f});
  p.beta = random_tensor(rng, {f});
  const Tensor<D> dy = random_tensor(rng, {n, steps, f});

  auto run = [&] {
    auto copy = p;
    return layers::batchnorm_apply(x, copy, layers::Mode::train);
  };
  const auto g = layers::batchnorm_backward(run().cache, p, dy);
  auto probe = [&] { return Probe{dot(run().output, dy), {}}; };

  Result r;
  r.name = "batchnorm";
  r.seed = seed;
  compare(r, "input", x, g.input, probe);
  compare(r, "gamma", p.gamma, g.params.gamma, probe);
  compare(r, "beta", p.beta, g.params.beta, probe);
  return r;
}

inline Result check_fc(std::uint64_t seed) {
  using namespace detail;
  Rng rng(seed);
  const std::size_t n = 4, in = 5, out = 3;
  Tensor<D> x = random_tensor(rng, {n, in});
  layers::FcParams<D> p{random_tensor(rng, {in, out}, 0.5), random_tensor(rng, {out}, 0.5)};
  const Tensor<D> dy = random_tensor(rng, {n, out});

  auto run = [&] { return layers::fc_forward(x, p, layers::Activation::relu); };
  const auto g = layers::fc_backward(run().cache, p, dy);
  auto probe = [&] {
    auto o = run();
    Probe pr{dot(o.output, dy), {}};
    append_signs(pr.pattern, o.cache.pre);
    return pr;
  };

  Result r;
  r.name = "fc";
  r.seed = seed;
  compare(r, "input", x, g.input, probe);
  compare(r, "weights", p.weights, g.params.weights, probe);
  compare(r, "bias", p.bias, g.params.bias, probe);
  return r;
}

/// A two-block dense model with attention, trained-mode BN, the real loss
/// (cross-entropy plus weight decay) and every trainable tensor checked.
inline Result check_model(std::uint64_t seed, std::size_t layers_per_block = 2) {
  using namespace detail;
  Rng rng(seed);
  const std::size_t n = 3, steps = 8, c = 3;
  const double wd = 0.01;
  model::ModelSpec spec = model::make_dense_spec(true, 2, layers_per_block, c, {4, 5});
  spec.fc_sizes = {6, 2};
  auto params = model::build_model<D>(spec, seed);
  // Move biases and BN affine terms off their special initial values so
  // their gradients are generic.
  model::for_each_trainable(params, [&](const std::string&, Tensor<D>& t) {
    for (auto& v : t.values()) v += rng.normal(0.0, 0.1);
  });
  const Tensor<D> x = random_tensor(rng, {n, steps, c});
  const std::vector<int> y{0, 1, 1};

  auto run = [&] {
    auto fwd = model::model_forward(spec, params, x, layers::Mode::train);
    return fwd;
  };
  auto fwd = run();
  const auto loss = training::compute_loss(fwd.logits, y, params, wd);
  auto grads = model::model_backward(params, fwd.cache, loss.logit_grads);
  training::add_weight_decay(grads, params, wd);

  auto probe = [&] {
    auto f = run();
    Probe pr{training::compute_loss(f.logits, y, params, wd).loss, {}};
    for (const auto& b : f.cache.blocks) {
      for (const auto& comp : b.components) {
        append_signs(pr.pattern, comp.rnn.hidden_pre);
        append_signs(pr.pattern, comp.rnn.output_pre);
      }
    }
    for (const auto& pool : f.cache.pools) append_argmax(pr.pattern, pool);
    for (const auto& fc : f.cache.fc) append_signs(pr.pattern, fc.pre);
    return pr;
  };

  std::vector<std::pair<std::string, Tensor<D>*>> targets;
  model::for_each_trainable(params, [&](const std::string& name, Tensor<D>& t) { targets.emplace_back(name, &t); });
  std::vector<const Tensor<D>*> analytic;
  model::for_each_trainable(std::as_const(grads), [&](const std::string&, const Tensor<D>& t) { analytic.push_back(&t); });

  Result r;
  r.name = "model";
  r.seed = seed;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    compare(r, targets[i].first, *targets[i].second, *analytic[i], probe);
  }
  return r;
}

/// Every check for every seed in `seeds`.
inline std::vector<Result> run_suite(const std::vector<std::uint64_t>& seeds) {
  std::vector<Result> out;
  for (auto seed : seeds) {
    out.push_back(check_attention(seed));
    out.push_back(check_indrnn(seed));
    out.push_back(check_batchnorm(seed));
    out.push_back(check_fc(seed));
    out.push_back(check_model(seed));
  }
  return out;
}

}  // namespace adindrnn::gradcheck
