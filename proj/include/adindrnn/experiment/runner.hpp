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


// Cross-validation rounds, segment-length sweeps and their on-disk results.
//
// Layout under an output directory:
//   rounds.csv                one row per round
//   summary.json, summary.csv mean and population std over successful rounds
//   rounds/round_NN/          curve.csv, metrics.json, model.json/.bin
// A sweep adds sweep_results.csv and sweep_statistics.csv and puts each
// length's cross-validation under L_<length>/.

#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "adindrnn/core/format.hpp"
#include "adindrnn/data/corpus.hpp"
#include "adindrnn/data/dataset.hpp"
#include "adindrnn/data/statistics.hpp"
#include "adindrnn/data/synthetic.hpp"
#include "adindrnn/experiment/config.hpp"
#include "adindrnn/model/checkpoint.hpp"
#include "adindrnn/training/trainer.hpp"

namespace adindrnn::experiment {

using Log = std::function<void(const std::string&)>;

inline data::Corpus load_corpus(const ExperimentConfig& c) {
  if (c.data.source == "synthetic") {
    auto s = data::make_synthetic_corpus(c.data.synthetic);
    return data::Corpus::from_records(std::move(s.records), std::move(s.annotations), c.data.channels);
  }
  auto ann = data::read_annotations(c.data.annotations, c.data.annotation_format);
  return data::Corpus::from_directory(c.data.root, std::move(ann), c.data.exclude, c.data.channels);
}

struct RoundOutcome {
  std::size_t round = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string message;
  std::size_t train_size = 0, val_size = 0, test_size = 0;
  std::size_t best_epoch = 0;
  training::MetricsReport metrics;
  std::vector<training::EpochRecord> curve;
};

struct CvRequest {
  double seg_len = 23.0;
  std::size_t decimate = 1;
  model::ModelSpec spec;
  training::TrainConfig train;
  std::size_t rounds = 10;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::filesystem::path out;
  std::optional<std::filesystem::path> cache_dir;
};

struct CvResult {
  model::ModelSpec spec;
  double seg_len = 0.0;
  std::vector<RoundOutcome> rounds;
  std::optional<training::CvSummary> summary;  // over the successful rounds
};

/// Builds the CvRequest of a config at one segment length.
inline CvRequest cv_request(const ExperimentConfig& c, const data::Corpus& corpus,
                            const nlohmann::json& model_json, double seg_len) {
  CvRequest r;
  r.seg_len = seg_len;
  r.decimate = c.decimate;
  r.spec = model::model_spec_from_json(model_json, corpus.channels().size());
  if (r.spec.channels != corpus.channels().size()) {
    throw ConfigError("model expects " + std::to_string(r.spec.channels) + " channels, the data has " +
                      std::to_string(corpus.channels().size()));
  }
  r.train = c.train;
  r.rounds = c.rounds;
  r.seed = c.seed;
  r.jobs = c.jobs;
  r.out = c.out;
  r.cache_dir = c.data.cache_dir;
  return r;
}

namespace detail {

inline std::string csv_value(const std::optional<double>& v) { return v ? shortest(*v) : "NA"; }

inline nlohmann::json json_value(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

inline std::string round_dir_name(std::size_t round) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "round_%02zu", round);
  return buf;
}

inline std::string length_dir_name(double seg_len) { return "L_" + shortest(seg_len); }

}  // namespace detail

inline std::string curve_csv(const std::vector<training::EpochRecord>& curve) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss,val_accuracy\n";
  for (const auto& e : curve) {
    out << e.epoch << ',' << shortest(e.train_loss) << ',' << detail::csv_value(e.val_loss) << ','
        << detail::csv_value(e.val_accuracy) << '\n';
  }
  return out.str();
}

inline nlohmann::json metrics_json(const training::MetricsReport& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"tn", m.tn},
          {"fn", m.fn},
          {"sensitivity", detail::json_value(m.sensitivity)},
          {"specificity", detail::json_value(m.specificity)},
          {"f1", detail::json_value(m.f1)},
          {"precision", detail::json_value(m.precision)},
          {"accuracy", detail::json_value(m.accuracy)}};
}

inline const char* rounds_csv_header() {
  return "round,status,seed,train_size,val_size,test_size,best_epoch,tp,fp,tn,fn,"
         "sensitivity,specificity,f1,precision,accuracy,message\n";
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

inline std::string rounds_csv(const std::vector<RoundOutcome>& rounds) {
  std::ostringstream out;
  out << rounds_csv_header();
  for (const auto& r : rounds) {
    out << r.round << ',' << (r.ok ? "ok" : "failed") << ',' << r.seed << ',' << r.train_size << ','
        << r.val_size << ',' << r.test_size << ',';
    if (r.ok) {
      const auto& m = r.metrics;
      out << r.best_epoch << ',' << m.tp << ',' << m.fp << ',' << m.tn << ',' << m.fn;
      for (const auto& v : m.columns()) out << ',' << detail::csv_value(v);
    } else {
      out << ",,,,,,,,,";
    }
    out << ',' << csv_escape(r.message) << '\n';
  }
  return out.str();
}

inline nlohmann::json summary_json(const CvResult& res) {
  nlohmann::json failed = nlohmann::json::array();
  std::size_t ok = 0;
  for (const auto& r : res.rounds) {
    if (r.ok) {
      ++ok;
    } else {
      failed.push_back({{"round", r.round}, {"message", r.message}});
    }
  }
  nlohmann::json metrics = nlohmann::json::object();
  if (res.summary) {
    for (std::size_t m = 0; m < 5; ++m) {
      const auto& s = res.summary->metrics[m];
      metrics[training::metric_names()[m]] = {{"mean", detail::json_value(s.mean)},
                                              {"std", detail::json_value(s.stddev)},
                                              {"defined", s.defined}};
    }
  }
  return {{"model", res.spec.name()}, {"spec", model::to_json(res.spec)}, {"seg_len", res.seg_len},
          {"rounds", res.rounds.size()}, {"succeeded", ok}, {"failed", failed},
          {"metrics", metrics}};
}

inline std::string summary_csv(const CvResult& res) {
  std::ostringstream out;
  out << "metric,mean,std,defined\n";
  for (std::size_t m = 0; m < 5; ++m) {
    out << training::metric_names()[m] << ',';
    if (res.summary) {
      const auto& s = res.summary->metrics[m];
      out << detail::csv_value(s.mean) << ',' << detail::csv_value(s.stddev) << ',' << s.defined;
    } else {
      out << "NA,NA,0";
    }
    out << '\n';
  }
  return out.str();
}

namespace detail {

template <typename T>
void train_round(const data::Corpus& corpus, const std::vector<data::SegmentInfo>& pool,
                 const CvRequest& req, const std::filesystem::path& dir, RoundOutcome& out,
                 const Log& log) {
  const auto ds = data::assemble_dataset(
      pool, [](const data::SegmentInfo& s) { return s.label_index(); }, derive_seed(out.seed, 0));
  out.train_size = ds.train.size();
  out.val_size = ds.val.size();
  out.test_size = ds.test.size();
  std::optional<data::SegmentCache> cache;
  if (req.cache_dir) cache.emplace(*req.cache_dir);
  const data::SegmentCache* cp = cache ? &*cache : nullptr;
  const auto train_set = corpus.materialize(ds.train, req.decimate, cp);
  const auto val_set = corpus.materialize(ds.val, req.decimate, cp);
  const auto test_set = corpus.materialize(ds.test, req.decimate, cp);
  if (test_set.empty()) throw DataError("the test split is empty");

  training::TrainConfig tc = req.train;
  tc.seed = derive_seed(out.seed, 1);
  auto res = training::train<T>(req.spec, train_set, val_set, tc, std::nullopt,
                                [&](const training::EpochRecord& e) {
                                  if (!log) return;
                                  log(round_dir_name(out.round) + " epoch " + std::to_string(e.epoch) +
                                      " train_loss " + fixed(e.train_loss, 4) + " val_acc " +
                                      fixed_or_na(e.val_accuracy, 4));
                                });
  const auto ev = training::evaluate(req.spec, res.params, test_set, tc.weight_decay);
  out.metrics = ev.metrics;
  out.best_epoch = res.best_epoch;
  out.curve = std::move(res.curve);
  out.ok = true;

  write_text(dir / "curve.csv", curve_csv(out.curve));
  nlohmann::json mj = metrics_json(out.metrics);
  mj["best_epoch"] = out.best_epoch;
  mj["seed"] = out.seed;
  write_text(dir / "metrics.json", mj.dump(2) + "\n");
  model::save_checkpoint(dir / "model", req.spec, res.params);
}

}  // namespace detail

/// One round: seeded class balancing and split, training, test metrics.
/// Artifacts go to `dir`. Errors are caught and recorded in the outcome.
inline RoundOutcome run_round(const data::Corpus& corpus, const std::vector<data::SegmentInfo>& pool,
                              const CvRequest& req, std::size_t round, const std::filesystem::path& dir,
                              const Log& log = {}) {
  RoundOutcome out;
  out.round = round;
  out.seed = derive_seed(req.seed, round);
  try {
    if (req.train.precision == training::Precision::f32) {
      detail::train_round<float>(corpus, pool, req, dir, out, log);
    } else {
      detail::train_round<double>(corpus, pool, req, dir, out, log);
    }
  } catch (const Error& e) {
    out.ok = false;
    out.message = e.what();
    out.best_epoch = 0;
    out.metrics = {};
    out.curve.clear();
    if (log) log(detail::round_dir_name(round) + " failed: " + e.what());
  }
  return out;
}

/// Repeated random sub-sampling cross-validation. Rounds are independent
/// and may run on `req.jobs` threads; results do not depend on the count.
inline CvResult run_cv(const data::Corpus& corpus, const CvRequest& req, const Log& log = {}) {
  req.spec.validate();
  req.train.validate();
  if (req.rounds == 0) throw ConfigError("cv: rounds must be at least 1");
  const auto pool = corpus.plan(req.seg_len);
  const std::size_t steps = pool.front().samples / std::max<std::size_t>(1, req.decimate);
  req.spec.validate_length(steps);

  CvResult res;
  res.spec = req.spec;
  res.seg_len = req.seg_len;
  res.rounds.resize(req.rounds);

  std::mutex log_mutex;
  Log safe_log;
  if (log) {
    safe_log = [&](const std::string& s) {
      std::lock_guard<std::mutex> lock(log_mutex);
      log(s);
    };
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < req.rounds;) {
      res.rounds[r] =
          run_round(corpus, pool, req, r, req.out / "rounds" / detail::round_dir_name(r), safe_log);
    }
  };
  const std::size_t threads = std::min(req.jobs, req.rounds);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool_threads;
    for (std::size_t i = 0; i < threads; ++i) pool_threads.emplace_back(worker);
    for (auto& t : pool_threads) t.join();
  }

  std::vector<training::MetricsReport> ok;
  for (const auto& r : res.rounds) {
    if (r.ok) ok.push_back(r.metrics);
  }
  if (!ok.empty()) res.summary = training::aggregate_cv(ok);

  detail::write_text(req.out / "rounds.csv", rounds_csv(res.rounds));
  detail::write_text(req.out / "summary.json", summary_json(res).dump(2) + "\n");
  detail::write_text(req.out / "summary.csv", summary_csv(res));
  return res;
}

inline const char* statistics_csv_header() {
  return "seg_len,status,seizure_segments,mean_seizure_seconds,type1_percent,type2_percent,"
         "type3_percent,message\n";
}

inline std::string statistics_csv_row(double seg_len, const std::string& status,
                                      const std::optional<data::SegmentStatistics>& s,
                                      const std::string& message = {}) {
  std::ostringstream out;
  out << shortest(seg_len) << ',' << status << ',';
  if (s) {
    out << s->seizure_segments << ',' << detail::csv_value(s->mean_seizure_seconds) << ','
        << detail::csv_value(s->type1_percent) << ',' << detail::csv_value(s->type2_percent) << ','
        << detail::csv_value(s->type3_percent);
  } else {
    out << ",,,,";
  }
  out << ',' << csv_escape(message) << '\n';
  return out.str();
}

inline const char* sweep_results_header() {
  return "seg_len,status,model,rounds_ok,sensitivity_mean,sensitivity_std,specificity_mean,"
         "specificity_std,f1_mean,f1_std,precision_mean,precision_std,accuracy_mean,accuracy_std,"
         "message\n";
}

struct SweepRow {
  double seg_len = 0.0;
  std::string status;  // "ok", "skipped" or "failed"
  std::string message;
  std::optional<data::SegmentStatistics> statistics;
  std::optional<CvResult> cv;
};

inline std::string sweep_results_row(const SweepRow& row, const std::string& model_name) {
  std::ostringstream out;
  out << shortest(row.seg_len) << ',' << row.status << ',' << csv_escape(model_name) << ',';
  std::size_t ok = 0;
  if (row.cv) {
    for (const auto& r : row.cv->rounds) ok += r.ok ? 1 : 0;
  }
  out << ok;
  for (std::size_t m = 0; m < 5; ++m) {
    if (row.cv && row.cv->summary) {
      const auto& s = row.cv->summary->metrics[m];
      out << ',' << detail::csv_value(s.mean) << ',' << detail::csv_value(s.stddev);
    } else {
      out << ",,";
    }
  }
  out << ',' << csv_escape(row.message) << '\n';
  return out.str();
}

/// Runs cross-validation at every sweep length. A length that does not fit
/// the shortest record is skipped with a warning row. Both CSVs are
/// rewritten after every length.
inline std::vector<SweepRow> run_sweep(const data::Corpus& corpus, const ExperimentConfig& c,
                                       const Log& log = {}) {
  const double shortest_record = corpus.shortest_duration();
  std::vector<SweepRow> rows;
  std::string model_name;
  std::string results = sweep_results_header(), stats = statistics_csv_header();
  for (double len : c.sweep.lengths) {
    SweepRow row;
    row.seg_len = len;
    CvRequest req;
    try {
      req = cv_request(c, corpus, c.sweep.model, len);
      model_name = req.spec.name();
      req.out = c.out / detail::length_dir_name(len);
      if (auto it = c.sweep.overrides.find(len); it != c.sweep.overrides.end()) {
        req.train = training::train_config_from_json(it->second, c.train);
      }
      if (len > shortest_record) {
        row.status = "skipped";
        row.message = "warning: longer than the shortest record (" + shortest(shortest_record) + " s)";
      } else {
        const auto pool = corpus.plan(len);
        row.statistics = data::segment_statistics(pool, len);
        if (log) log("sweep L=" + shortest(len) + ": " + std::to_string(row.statistics->seizure_segments) +
                     " seizure segments");
        row.cv = run_cv(corpus, req, log);
        row.status = row.cv->summary ? "ok" : "failed";
        if (!row.cv->summary) row.message = "every round failed";
      }
    } catch (const Error& e) {
      row.status = row.status.empty() ? "failed" : row.status;
      row.message = e.what();
      if (log) log("sweep L=" + shortest(len) + " " + row.status + ": " + e.what());
    }
    results += sweep_results_row(row, model_name);
    stats += statistics_csv_row(len, row.status, row.statistics, row.message);
    detail::write_text(c.out / "sweep_results.csv", results);
    detail::write_text(c.out / "sweep_statistics.csv", stats);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Segment listing and statistics of a corpus at one length; fills the
/// segment cache when one is configured.
inline data::SegmentStatistics run_segment(const data::Corpus& corpus, const ExperimentConfig& c) {
  const auto pool = corpus.plan(c.seg_len);
  const auto stats = data::segment_statistics(pool, c.seg_len);
  std::ostringstream list;
  list << "record_id,start_s,length_s,label,seizure_seconds\n";
  for (const auto& s : pool) {
    list << csv_escape(s.record_id) << ',' << shortest(s.start()) << ',' << shortest(s.length()) << ','
         << data::to_string(s.label) << ',' << shortest(s.seizure_seconds) << '\n';
  }
  detail::write_text(c.out / "segments.csv", list.str());
  detail::write_text(c.out / "statistics.csv",
                     std::string(statistics_csv_header()) + statistics_csv_row(c.seg_len, "ok", stats));
  if (c.data.cache_dir) {
    const data::SegmentCache cache(*c.data.cache_dir);
    std::vector<data::SegmentInfo> batch;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      batch.push_back(pool[i]);
      if (i + 1 == pool.size() || pool[i + 1].record_id != pool[i].record_id) {
        corpus.materialize(batch, c.decimate, &cache);
        batch.clear();
      }
    }
  }
  return stats;
}

/// One row per segment: where it came from, its label, and the attention
/// weight of every channel.
inline std::string attention_csv(const std::vector<data::SegmentRef>& segments,
                                 const Tensor<double>& weights, const std::vector<std::string>& channels) {
  std::ostringstream out;
  out << "record_id,start_s,label";
  for (const auto& ch : channels) out << ',' << csv_escape(ch);
  out << '\n';
  for (std::size_t i = 0; i < segments.size(); ++i) {
    out << csv_escape(segments[i]->info.record_id) << ',' << shortest(segments[i]->info.start()) << ','
        << segments[i]->info.label_index();
    for (std::size_t c = 0; c < channels.size(); ++c) out << ',' << shortest(weights.at(i, c));
    out << '\n';
  }
  return out.str();
}

}  // namespace adindrnn::experiment
