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


// On-disk cache of one record's segments at one segment length and channel
// list. `<key>.json` is the manifest (segment metadata and blob offsets);
// `<key>.bin` holds the samples as little-endian f32, segment after segment,
// each [steps x channels] row-major.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adindrnn/core/bytes.hpp"
#include "adindrnn/core/format.hpp"
#include "adindrnn/data/segment.hpp"

namespace adindrnn::data {

inline constexpr const char* kSegmentCacheFormat = "adindrnn-segments";
inline constexpr int kSegmentCacheVersion = 1;

/// 64-bit FNV-1a over the channel labels, each terminated by '\n'.
inline std::uint64_t channel_list_hash(const std::vector<std::string>& channels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& c : channels) {
    for (unsigned char ch : c + '\n') {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

class SegmentCache {
 public:
  explicit SegmentCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path stem(const std::string& record_id, double seg_len,
                             const std::vector<std::string>& channels, std::size_t decimate) const {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(channel_list_hash(channels)));
    return dir_ / (record_id + "_L" + shortest(seg_len) + "_" + hash + "_d" + std::to_string(decimate));
  }

  void store(const std::string& record_id, double seg_len, const std::vector<std::string>& channels,
             std::size_t decimate, const std::vector<Segment>& segments) const {
    std::filesystem::create_directories(dir_);
    const auto s = stem(record_id, seg_len, channels, decimate);
    nlohmann::json manifest{{"format", kSegmentCacheFormat},
                            {"version", kSegmentCacheVersion},
                            {"record_id", record_id},
                            {"seg_len", seg_len},
                            {"channels", channels},
                            {"decimate", decimate}};
    nlohmann::json rows = nlohmann::json::array();
    std::ofstream bin(path_with(s, ".bin"), std::ios::binary);
    std::size_t offset = 0;
    for (const auto& seg : segments) {
      rows.push_back({{"start_sample", seg.info.start_sample},
                      {"samples", seg.info.samples},
                      {"rate", seg.info.rate},
                      {"label", seg.info.label_index()},
                      {"seizure_seconds", seg.info.seizure_seconds},
                      {"shape", seg.data.shape()},
                      {"offset", offset}});
      for (float v : seg.data.values()) write_le(bin, v);
      offset += seg.data.size();
    }
    if (!bin) throw Error("failed writing " + path_with(s, ".bin").string());
    manifest["segments"] = std::move(rows);
    std::ofstream js(path_with(s, ".json"));
    js << manifest.dump(1) << '\n';
    if (!js) throw Error("failed writing " + path_with(s, ".json").string());
  }

  /// The cached segments, or nullopt when there is no entry for this key.
  std::optional<std::vector<Segment>> load(const std::string& record_id, double seg_len,
                                           const std::vector<std::string>& channels,
                                           std::size_t decimate) const {
    const auto s = stem(record_id, seg_len, channels, decimate);
    if (!std::filesystem::exists(path_with(s, ".json")) ||
        !std::filesystem::exists(path_with(s, ".bin"))) {
      return std::nullopt;
    }
    std::ifstream js(path_with(s, ".json"));
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("segment cache manifest: ") + e.what(), 0);
    }
    if (manifest.value("format", "") != kSegmentCacheFormat ||
        manifest.value("version", 0) != kSegmentCacheVersion ||
        manifest.at("channels").get<std::vector<std::string>>() != channels) {
      throw ParseError("segment cache " + s.string() + " does not match its key", 0);
    }
    const auto blob = read_file_bytes(path_with(s, ".bin"));
    std::vector<Segment> out;
    for (const auto& row : manifest.at("segments")) {
      Segment seg;
      seg.info.record_id = record_id;
      seg.info.start_sample = row.at("start_sample").get<std::size_t>();
      seg.info.samples = row.at("samples").get<std::size_t>();
      seg.info.rate = row.at("rate").get<double>();
      seg.info.label = row.at("label").get<int>() == 1 ? Label::seizure : Label::nonseizure;
      seg.info.seizure_seconds = row.at("seizure_seconds").get<double>();
      seg.data = Tensor<float>(row.at("shape").get<Shape>());
      const std::size_t off = row.at("offset").get<std::size_t>();
      if ((off + seg.data.size()) * 4 > blob.size()) {
        throw ParseError("segment cache blob is truncated", blob.size());
      }
      for (std::size_t i = 0; i < seg.data.size(); ++i) {
        seg.data[i] = read_le<float>(blob.data() + 4 * (off + i));
      }
      out.push_back(std::move(seg));
    }
    return out;
  }

 private:
  static std::filesystem::path path_with(const std::filesystem::path& stem, const char* ext) {
    return std::filesystem::path(stem.string() + ext);
  }

  std::filesystem::path dir_;
};

}  // namespace adindrnn::data
