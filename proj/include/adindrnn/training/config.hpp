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
#include <string>

#include <nlohmann/json.hpp>

#include "adindrnn/core/error.hpp"

namespace adindrnn::training {

enum class Precision { f64, f32 };

struct TrainConfig {
  double learning_rate = 0.0004;
  std::size_t batch_size = 30;
  std::size_t epochs = 60;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  Precision precision = Precision::f64;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
    if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
    if (!(weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be non-negative");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
      throw ConfigError("train: Adam betas must lie in (0, 1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("train: Adam epsilon must be positive");
  }
};

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"epochs", c.epochs},               {"weight_decay", c.weight_decay},
          {"beta1", c.beta1},                 {"beta2", c.beta2},
          {"epsilon", c.epsilon},             {"seed", c.seed},
          {"precision", c.precision == Precision::f32 ? "f32" : "f64"}};
}

/// Missing keys keep their defaults.
inline TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c = {}) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.seed = j.value("seed", c.seed);
  if (j.contains("precision")) {
    const auto p = j["precision"].get<std::string>();
    if (p == "f32") {
      c.precision = Precision::f32;
    } else if (p == "f64") {
      c.precision = Precision::f64;
    } else {
      throw ConfigError("train: precision must be f32 or f64");
    }
  }
  c.validate();
  return c;
}

}  // namespace adindrnn::training
