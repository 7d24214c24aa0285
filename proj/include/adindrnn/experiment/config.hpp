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


// Experiment configuration: where the data comes from, how it is cut, which
// model to train and how, and where results go. Read from JSON; relative
// paths are resolved against the config file's directory.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adindrnn/core/format.hpp"
#include "adindrnn/data/annotations.hpp"
#include "adindrnn/data/synthetic.hpp"
#include "adindrnn/model/spec.hpp"
#include "adindrnn/training/config.hpp"

namespace adindrnn::experiment {

/// Overrides DataConfig::root when set.
inline constexpr const char* kDataRootEnv = "ADINDRNN_DATA_ROOT";

inline const std::vector<double>& default_sweep_lengths() {
  static const std::vector<double> lengths{23, 30, 35, 40, 45, 50, 55, 60, 70, 80, 90, 100, 110};
  return lengths;
}

struct DataConfig {
  std::string source = "synthetic";  // "synthetic" or "edf"
  std::filesystem::path root;        // directory searched for *.edf
  std::filesystem::path annotations;
  data::AnnotationFormat annotation_format = data::AnnotationFormat::csv;
  std::vector<std::string> exclude;   // record ids left out
  std::vector<std::string> channels;  // empty: labels common to all records
  data::SyntheticCorpusSpec synthetic;
  std::optional<std::filesystem::path> cache_dir;
};

struct SweepConfig {
  std::vector<double> lengths = default_sweep_lengths();
  nlohmann::json model = "IndRNN-12";
  // Per-length TrainConfig overrides, keyed by the length as written.
  std::map<double, nlohmann::json> overrides;
};

struct ExperimentConfig {
  DataConfig data;
  double seg_len = 23.0;
  std::size_t decimate = 1;
  nlohmann::json model = "ADIndRNN-(3,3)";
  training::TrainConfig train;
  std::size_t rounds = 10;
  std::uint64_t seed = 0;
  std::filesystem::path out = "runs/default";
  std::size_t jobs = 1;
  SweepConfig sweep;

  void validate() const {
    if (rounds == 0) throw ConfigError("config: rounds must be at least 1");
    if (!(seg_len > 0.0)) throw ConfigError("config: seg_len must be positive");
    if (decimate == 0) throw ConfigError("config: decimate must be at least 1");
    if (jobs == 0) throw ConfigError("config: jobs must be at least 1");
    if (data.source != "synthetic" && data.source != "edf") {
      throw ConfigError("config: data.source must be 'synthetic' or 'edf'");
    }
    if (data.source == "edf") {
      if (data.root.empty()) throw ConfigError("config: data.root is required for EDF data");
      if (data.annotations.empty()) throw ConfigError("config: data.annotations is required for EDF data");
    }
    for (double l : sweep.lengths) {
      if (!(l > 0.0)) throw ConfigError("config: sweep lengths must be positive");
    }
    train.validate();
  }
};

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace detail

/// Missing keys keep their defaults. `base_dir` anchors relative paths.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    const std::filesystem::path& base_dir = {}) {
  ExperimentConfig c;
  try {
    if (j.contains("data")) {
      const auto& d = j["data"];
      c.data.source = d.value("source", c.data.source);
      if (d.contains("root")) c.data.root = detail::resolve(base_dir, d["root"].get<std::string>());
      if (d.contains("annotations")) {
        c.data.annotations = detail::resolve(base_dir, d["annotations"].get<std::string>());
      }
      if (d.contains("annotation_format")) {
        c.data.annotation_format = data::annotation_format_from_string(d["annotation_format"].get<std::string>());
      }
      c.data.exclude = d.value("exclude", c.data.exclude);
      c.data.channels = d.value("channels", c.data.channels);
      if (d.contains("synthetic")) c.data.synthetic = data::synthetic_corpus_spec_from_json(d["synthetic"]);
      if (d.contains("cache_dir") && !d["cache_dir"].is_null()) {
        c.data.cache_dir = detail::resolve(base_dir, d["cache_dir"].get<std::string>());
      }
    }
    c.seg_len = j.value("seg_len", c.seg_len);
    c.decimate = j.value("decimate", c.decimate);
    if (j.contains("model")) c.model = j["model"];
    if (j.contains("train")) c.train = training::train_config_from_json(j["train"]);
    c.rounds = j.value("rounds", c.rounds);
    c.seed = j.value("seed", c.seed);
    if (j.contains("out")) c.out = detail::resolve(base_dir, j["out"].get<std::string>());
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      c.sweep.lengths = s.value("lengths", c.sweep.lengths);
      if (s.contains("model")) c.sweep.model = s["model"];
      if (s.contains("overrides")) {
        for (const auto& [key, value] : s["overrides"].items()) {
          std::size_t used = 0;
          const double len = std::stod(key, &used);
          if (used != key.size()) throw ConfigError("config: sweep override key '" + key + "' is not a length");
          c.sweep.overrides[len] = value;
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError("config: sweep override keys must be lengths in seconds");
  }
  c.validate();
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json d{{"source", c.data.source},
                   {"root", c.data.root.string()},
                   {"annotations", c.data.annotations.string()},
                   {"annotation_format",
                    c.data.annotation_format == data::AnnotationFormat::csv ? "csv" : "chb_summary"},
                   {"exclude", c.data.exclude},
                   {"channels", c.data.channels}};
  const auto& s = c.data.synthetic;
  d["synthetic"] = {{"records", s.records},
                    {"duration", s.duration},
                    {"rate", s.rate},
                    {"channels", s.channels},
                    {"informative_channels", s.informative_channels},
                    {"seizures_per_record", s.seizures_per_record},
                    {"seizure_min", s.seizure_min},
                    {"seizure_max", s.seizure_max},
                    {"align", s.align ? nlohmann::json(*s.align) : nlohmann::json()},
                    {"align_offset", s.align_offset},
                    {"noise_sd", s.signal.noise_sd},
                    {"seed", s.seed}};
  d["cache_dir"] = c.data.cache_dir ? nlohmann::json(c.data.cache_dir->string()) : nlohmann::json();
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [len, o] : c.sweep.overrides) overrides[shortest(len)] = o;
  return {{"data", d},
          {"seg_len", c.seg_len},
          {"decimate", c.decimate},
          {"model", c.model},
          {"train", training::to_json(c.train)},
          {"rounds", c.rounds},
          {"seed", c.seed},
          {"out", c.out.string()},
          {"jobs", c.jobs},
          {"sweep", {{"lengths", c.sweep.lengths}, {"model", c.sweep.model}, {"overrides", overrides}}}};
}

inline void apply_environment(ExperimentConfig& c) {
  if (const char* root = std::getenv(kDataRootEnv); root && *root) c.data.root = root;
}

/// Reads a JSON config file and applies the data-root environment override.
inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config ") + path.string() + ": " + e.what(), e.byte);
  }
  ExperimentConfig c = experiment_config_from_json(j, path.parent_path());
  apply_environment(c);
  return c;
}

}  // namespace adindrnn::experiment
