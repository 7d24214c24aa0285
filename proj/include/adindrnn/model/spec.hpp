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
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adindrnn/core/error.hpp"
#include "adindrnn/layers/activation.hpp"
#include "adindrnn/layers/pooling.hpp"

namespace adindrnn::model {

using layers::Activation;

enum class Variant { adindrnn, dindrnn, aindrnn, indrnn };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::adindrnn: return "adindrnn";
    case Variant::dindrnn: return "dindrnn";
    case Variant::aindrnn: return "aindrnn";
    case Variant::indrnn: return "indrnn";
  }
  return "?";
}

inline Variant variant_from_string(const std::string& s) {
  if (s == "adindrnn") return Variant::adindrnn;
  if (s == "dindrnn") return Variant::dindrnn;
  if (s == "aindrnn") return Variant::aindrnn;
  if (s == "indrnn") return Variant::indrnn;
  throw ConfigError("unknown model variant '" + s + "'");
}

struct BlockSpec {
  std::size_t layers = 1;
  std::size_t state_size = 80;

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

struct InitSpec {
  double attention_stddev = 0.1;  // truncated at two standard deviations
  double fc_bias = 0.001;
  double recurrent_min = 0.0;
  double recurrent_max = 1.0;

  friend bool operator==(const InitSpec&, const InitSpec&) = default;
};

/// Declarative description of one member of the architecture family.
///
/// Every block is a stack of (IndRNN, BN) components followed by one
/// temporal max pool. With `dense` set, component i reads the feature-axis
/// concatenation of the block input and all earlier component outputs;
/// otherwise components are chained. IndRNN-k and AIndRNN-k are expressed
/// as k single-component blocks, which gives the IndRNN -> BN -> max pool
/// ordering for every layer.
struct ModelSpec {
  Variant variant = Variant::adindrnn;
  std::size_t channels = 17;
  std::vector<BlockSpec> blocks;
  bool use_attention = true;
  bool dense = true;
  std::vector<std::size_t> fc_sizes{100, 2};
  std::size_t pool_window = 2;
  std::size_t pool_stride = 2;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::relu;
  Activation fc_activation = Activation::relu;
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.9;
  InitSpec init;
  std::optional<double> recurrent_clip;  // |u| bound applied after each step

  static constexpr std::size_t kClasses = 2;

  std::size_t total_layers() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.layers;
    return n;
  }

  /// Conventional name, e.g. "ADIndRNN-(3,3)" or "IndRNN-9".
  std::string name() const {
    switch (variant) {
      case Variant::adindrnn:
      case Variant::dindrnn: {
        const std::string prefix = variant == Variant::adindrnn ? "ADIndRNN" : "DIndRNN";
        const std::size_t per = blocks.empty() ? 0 : blocks.front().layers;
        return prefix + "-(" + std::to_string(blocks.size()) + "," +
               std::to_string(per) + ")";
      }
      case Variant::aindrnn: return "AIndRNN-" + std::to_string(total_layers());
      case Variant::indrnn: return "IndRNN-" + std::to_string(total_layers());
    }
    return "?";
  }

  void validate() const {
    if (channels == 0) throw ConfigError("model: channels must be positive");
    if (blocks.empty()) throw ConfigError("model: at least one block is required");
    for (const auto& b : blocks) {
      if (b.layers == 0 || b.state_size == 0) {
        throw ConfigError("model: blocks need positive layer counts and state sizes");
      }
    }
    if (fc_sizes.empty() || fc_sizes.back() != kClasses) {
      throw ConfigError("model: the final fully connected layer must have " +
                        std::to_string(kClasses) + " outputs");
    }
    for (std::size_t s : fc_sizes) {
      if (s == 0) throw ConfigError("model: fully connected sizes must be positive");
    }
    if (pool_window == 0 || pool_stride == 0) {
      throw ConfigError("model: pool window and stride must be positive");
    }
    if (!(bn_epsilon > 0.0) || !(bn_momentum > 0.0 && bn_momentum < 1.0)) {
      throw ConfigError("model: batchnorm epsilon must be > 0 and momentum in (0,1)");
    }
    if (init.recurrent_max < init.recurrent_min) {
      throw ConfigError("model: recurrent init range is empty");
    }
    if (recurrent_clip && !(*recurrent_clip > 0.0)) {
      throw ConfigError("model: recurrent clip must be positive");
    }
  }

  /// Rejects sequence lengths that cannot survive every pooling stage.
  void validate_length(std::size_t steps) const {
    std::size_t t = steps;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (t < pool_window) {
        throw ConfigError(name() + ": pooling stage " + std::to_string(b + 1) +
                          " receives " + std::to_string(t) +
                          " time steps, fewer than the window of " +
                          std::to_string(pool_window) + " (input length " +
                          std::to_string(steps) + ")");
      }
      t = layers::pooled_length(t, pool_window, pool_stride);
    }
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// State size of the b-th block (or b-th group of three layers): 80, 120,
/// 160, then continuing in steps of 40.
inline std::size_t default_state_size(std::size_t group) { return 80 + 40 * group; }

inline ModelSpec make_dense_spec(bool attention, std::size_t blocks,
                                 std::size_t layers_per_block, std::size_t channels,
                                 std::vector<std::size_t> state_sizes = {}) {
  ModelSpec s;
  s.variant = attention ? Variant::adindrnn : Variant::dindrnn;
  s.use_attention = attention;
  s.dense = true;
  s.channels = channels;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t h = b < state_sizes.size() ? state_sizes[b] : default_state_size(b);
    s.blocks.push_back({layers_per_block, h});
  }
  return s;
}

inline ModelSpec make_stacked_spec(bool attention, std::size_t layers,
                                   std::size_t channels,
                                   std::vector<std::size_t> state_sizes = {}) {
  ModelSpec s;
  s.variant = attention ? Variant::aindrnn : Variant::indrnn;
  s.use_attention = attention;
  s.dense = false;
  s.channels = channels;
  for (std::size_t i = 0; i < layers; ++i) {
    const std::size_t h = i < state_sizes.size() ? state_sizes[i] : default_state_size(i / 3);
    s.blocks.push_back({1, h});
  }
  return s;
}

/// Parses "ADIndRNN-(3,3)", "DIndRNN-(4,3)", "AIndRNN-9" or "IndRNN-12"
/// (case-insensitive) into a spec with default state sizes.
inline ModelSpec parse_model_name(const std::string& name, std::size_t channels) {
  static const std::regex dense(R"(^(A?)DIndRNN-\((\d+),(\d+)\)$)", std::regex::icase);
  static const std::regex stacked(R"(^(A?)IndRNN-(\d+)$)", std::regex::icase);
  std::smatch m;
  if (std::regex_match(name, m, dense)) {
    return make_dense_spec(!m[1].str().empty(), std::stoul(m[2].str()),
                           std::stoul(m[3].str()), channels);
  }
  if (std::regex_match(name, m, stacked)) {
    return make_stacked_spec(!m[1].str().empty(), std::stoul(m[2].str()), channels);
  }
  throw ConfigError("unrecognised model name '" + name + "'");
}

inline nlohmann::json to_json(const ModelSpec& s) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : s.blocks) {
    blocks.push_back({{"layers", b.layers}, {"state_size", b.state_size}});
  }
  nlohmann::json j = {
      {"variant", to_string(s.variant)},
      {"channels", s.channels},
      {"blocks", blocks},
      {"use_attention", s.use_attention},
      {"dense", s.dense},
      {"fc_sizes", s.fc_sizes},
      {"pool_window", s.pool_window},
      {"pool_stride", s.pool_stride},
      {"hidden_activation", layers::to_string(s.hidden_activation)},
      {"output_activation", layers::to_string(s.output_activation)},
      {"fc_activation", layers::to_string(s.fc_activation)},
      {"bn_epsilon", s.bn_epsilon},
      {"bn_momentum", s.bn_momentum},
      {"init",
       {{"attention_stddev", s.init.attention_stddev},
        {"fc_bias", s.init.fc_bias},
        {"recurrent_min", s.init.recurrent_min},
        {"recurrent_max", s.init.recurrent_max}}},
  };
  j["recurrent_clip"] = s.recurrent_clip ? nlohmann::json(*s.recurrent_clip) : nlohmann::json();
  return j;
}

/// Accepts either a full object (as written by to_json) or an object with a
/// "name" field plus overrides, e.g. {"name": "ADIndRNN-(2,2)",
/// "state_sizes": [8, 8], "channels": 3}.
inline ModelSpec model_spec_from_json(const nlohmann::json& j,
                                      std::size_t default_channels = 17) {
  if (j.is_string()) return parse_model_name(j.get<std::string>(), default_channels);
  const std::size_t channels = j.value("channels", default_channels);
  ModelSpec s;
  if (j.contains("name")) {
    const auto sizes = j.value("state_sizes", std::vector<std::size_t>{});
    s = parse_model_name(j.at("name").get<std::string>(), channels);
    if (!sizes.empty()) {
      if (s.variant == Variant::adindrnn || s.variant == Variant::dindrnn) {
        for (std::size_t b = 0; b < s.blocks.size() && b < sizes.size(); ++b) {
          s.blocks[b].state_size = sizes[b];
        }
      } else {
        for (std::size_t i = 0; i < s.blocks.size() && i < sizes.size(); ++i) {
          s.blocks[i].state_size = sizes[i];
        }
      }
    }
  } else {
    s.variant = variant_from_string(j.at("variant").get<std::string>());
    s.channels = channels;
    for (const auto& b : j.at("blocks")) {
      s.blocks.push_back({b.at("layers").get<std::size_t>(),
                          b.at("state_size").get<std::size_t>()});
    }
    s.use_attention = j.value("use_attention",
                              s.variant == Variant::adindrnn || s.variant == Variant::aindrnn);
    s.dense = j.value("dense", s.variant == Variant::adindrnn || s.variant == Variant::dindrnn);
  }
  s.fc_sizes = j.value("fc_sizes", s.fc_sizes);
  s.pool_window = j.value("pool_window", s.pool_window);
  s.pool_stride = j.value("pool_stride", s.pool_stride);
  if (j.contains("hidden_activation")) {
    s.hidden_activation = layers::activation_from_string(j["hidden_activation"].get<std::string>());
  }
  if (j.contains("output_activation")) {
    s.output_activation = layers::activation_from_string(j["output_activation"].get<std::string>());
  }
  if (j.contains("fc_activation")) {
    s.fc_activation = layers::activation_from_string(j["fc_activation"].get<std::string>());
  }
  s.bn_epsilon = j.value("bn_epsilon", s.bn_epsilon);
  s.bn_momentum = j.value("bn_momentum", s.bn_momentum);
  if (j.contains("init")) {
    const auto& i = j["init"];
    s.init.attention_stddev = i.value("attention_stddev", s.init.attention_stddev);
    s.init.fc_bias = i.value("fc_bias", s.init.fc_bias);
    s.init.recurrent_min = i.value("recurrent_min", s.init.recurrent_min);
    s.init.recurrent_max = i.value("recurrent_max", s.init.recurrent_max);
  }
  if (j.contains("recurrent_clip") && !j["recurrent_clip"].is_null()) {
    s.recurrent_clip = j["recurrent_clip"].get<double>();
  }
  s.validate();
  return s;
}

}  // namespace adindrnn::model
