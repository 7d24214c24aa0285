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

#include <string>
#include <string_view>

#include "adindrnn/core/error.hpp"

namespace adindrnn::layers {

enum class Activation { relu, identity };

inline std::string_view to_string(Activation a) {
  return a == Activation::relu ? "relu" : "identity";
}

inline Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity" || s == "linear") return Activation::identity;
  throw ConfigError("unknown activation '" + std::string(s) + "'");
}

template <typename T>
inline T activate(Activation a, T pre) {
  return (a == Activation::relu && pre < T{0}) ? T{0} : pre;
}

/// Derivative evaluated at the pre-activation value. ReLU uses 0 at 0.
template <typename T>
inline T activate_grad(Activation a, T pre) {
  if (a == Activation::identity) return T{1};
  return pre > T{0} ? T{1} : T{0};
}

}  // namespace adindrnn::layers
