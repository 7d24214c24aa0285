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

// Checkpoint layout: `<stem>.json` holds the format tag, version, scalar
// type, the ModelSpec and a manifest of tensors (name, shape, element
// offset); `<stem>.bin` holds the raw little-endian values back to back.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "adindrnn/core/bytes.hpp"
#include "adindrnn/model/params.hpp"
#include "adindrnn/model/spec.hpp"

namespace adindrnn::model {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointFormat = "adindrnn-checkpoint";

namespace detail {

template <typename T>
constexpr const char* dtype_name() {
  return std::is_same_v<T, float> ? "f32" : "f64";
}

}  // namespace detail

template <typename T>
struct Checkpoint {
  ModelSpec spec;
  ModelParams<T> params;
};

/// Writes `<stem>.json` and `<stem>.bin`. `stem` must not carry an extension.
template <typename T>
void save_checkpoint(const std::filesystem::path& stem, const ModelSpec& spec,
                     const ModelParams<T>& params) {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  std::filesystem::path json_path = stem, bin_path = stem;
  json_path += ".json";
  bin_path += ".bin";
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());

  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw Error("cannot open " + bin_path.string() + " for writing");
  nlohmann::json tensors = nlohmann::json::array();
  std::size_t offset = 0;
  auto emit = [&](const std::string& kind) {
    return [&, kind](const std::string& name, const Tensor<T>& t) {
      tensors.push_back({{"name", name}, {"kind", kind}, {"shape", t.shape()}, {"offset", offset}});
      for (T v : t.values()) write_le(bin, v);
      offset += t.size();
    };
  };
  for_each_trainable(params, emit("trainable"));
  for_each_buffer(params, emit("buffer"));
  if (!bin) throw Error("failed writing " + bin_path.string());

  nlohmann::json manifest = {
      {"format", kCheckpointFormat},
      {"version", kCheckpointVersion},
      {"dtype", detail::dtype_name<T>()},
      {"blob", bin_path.filename().string()},
      {"elements", offset},
      {"spec", to_json(spec)},
      {"tensors", tensors},
  };
  std::ofstream js(json_path);
  js << manifest.dump(2) << '\n';
  if (!js) throw Error("failed writing " + json_path.string());
}

/// Loads a checkpoint written by save_checkpoint, converting the stored
/// scalar type to T. Accepts the stem or the .json path.
template <typename T>
Checkpoint<T> load_checkpoint(std::filesystem::path path) {
  if (path.extension() != ".json") path += ".json";
  std::ifstream js(path);
  if (!js) throw Error("cannot open checkpoint " + path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(js);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint manifest: ") + e.what(), 0);
  }
  if (manifest.value("format", "") != kCheckpointFormat) {
    throw ParseError("not an adindrnn checkpoint: " + path.string(), 0);
  }
  if (manifest.value("version", 0) != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " +
                         std::to_string(manifest.value("version", 0)), 0);
  }
  const std::string dtype = manifest.at("dtype").get<std::string>();
  const std::size_t width = dtype == "f32" ? 4 : dtype == "f64" ? 8 : 0;
  if (width == 0) throw ParseError("unknown checkpoint dtype " + dtype, 0);

  const auto bin_path = path.parent_path() / manifest.at("blob").get<std::string>();
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw Error("cannot open checkpoint blob " + bin_path.string());
  std::vector<unsigned char> blob((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  const std::size_t elements = manifest.at("elements").get<std::size_t>();
  if (blob.size() != elements * width) {
    throw ParseError("checkpoint blob has " + std::to_string(blob.size()) + " bytes, expected " +
                         std::to_string(elements * width), blob.size());
  }

  Checkpoint<T> ck{model_spec_from_json(manifest.at("spec")), {}};
  ck.params = build_model<T>(ck.spec, 0);

  std::map<std::string, nlohmann::json> entries;
  for (const auto& t : manifest.at("tensors")) entries[t.at("name").get<std::string>()] = t;

  auto fill = [&](const std::string& name, Tensor<T>& t) {
    auto it = entries.find(name);
    if (it == entries.end()) throw ParseError("checkpoint is missing tensor " + name, 0);
    const auto shape = it->second.at("shape").get<Shape>();
    if (shape != t.shape()) {
      throw DimensionError("checkpoint tensor " + name + " has shape " + shape_to_string(shape) +
                           ", spec expects " + shape_to_string(t.shape()));
    }
    const std::size_t off = it->second.at("offset").get<std::size_t>();
    if ((off + t.size()) * width > blob.size()) {
      throw ParseError("checkpoint tensor " + name + " runs past the blob", off * width);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      const unsigned char* p = blob.data() + (off + i) * width;
      t[i] = width == 4 ? static_cast<T>(read_le<float>(p))
                        : static_cast<T>(read_le<double>(p));
    }
  };
  for_each_trainable(ck.params, fill);
  for_each_buffer(ck.params, fill);
  return ck;
}

}  // namespace adindrnn::model
