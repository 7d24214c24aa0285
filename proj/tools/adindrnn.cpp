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


// Command-line experiment runner.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif
#include "adindrnn/data/dataset.hpp"
#include "adindrnn/experiment/runner.hpp"
#include "adindrnn/gradcheck.hpp"

namespace {

using namespace adindrnn;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> seg_len;
  std::optional<std::size_t> rounds;
  std::optional<std::size_t> decimate;
  std::optional<std::size_t> jobs;
  bool quiet = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON experiment config");
  app->add_option("--seed", f.seed, "experiment seed");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--seg-len", f.seg_len, "segment length in seconds");
  app->add_option("--rounds", f.rounds, "cross-validation rounds");
  app->add_option("--decimate", f.decimate, "keep every n-th sample");
  app->add_option("--jobs", f.jobs, "rounds trained in parallel");
  app->add_flag("-q,--quiet", f.quiet, "no progress output");
}

experiment::ExperimentConfig resolve(const CommonFlags& f) {
  experiment::ExperimentConfig c;
  if (!f.config.empty()) {
    c = experiment::load_experiment_config(f.config);
  } else {
    experiment::apply_environment(c);
  }
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.seg_len) c.seg_len = *f.seg_len;
  if (f.rounds) c.rounds = *f.rounds;
  if (f.decimate) c.decimate = *f.decimate;
  if (f.jobs) c.jobs = *f.jobs;
  c.validate();
  return c;
}

experiment::Log make_log(const CommonFlags& f) {
  if (f.quiet) return {};
  return [](const std::string& s) { std::clog << s << '\n'; };
}

void write_config_copy(const experiment::ExperimentConfig& c) {
  std::filesystem::create_directories(c.out);
  std::ofstream(c.out / "config.json") << experiment::to_json(c).dump(2) << '\n';
}

void print_summary(const experiment::CvResult& r) {
  std::printf("%s, %s s segments, %zu rounds\n", r.spec.name().c_str(), shortest(r.seg_len).c_str(),
              r.rounds.size());
  if (!r.summary) {
    std::printf("no round succeeded\n");
    return;
  }
  for (std::size_t m = 0; m < 5; ++m) {
    const auto& s = r.summary->metrics[m];
    std::printf("  %-12s %s +- %s\n", training::metric_names()[m], fixed_or_na(s.mean, 4).c_str(),
                fixed_or_na(s.stddev, 4).c_str());
  }
}

int cmd_segment(const CommonFlags& f) {
  const auto c = resolve(f);
  const auto corpus = experiment::load_corpus(c);
  const auto s = experiment::run_segment(corpus, c);
  std::printf("%zu records, %zu channels, L = %s s\n", corpus.entries().size(), corpus.channels().size(),
              shortest(c.seg_len).c_str());
  std::printf("seizure segments %zu, mean seizure length %s s, type-1 %s%%, type-2 %s%%, type-3 %s%%\n",
              s.seizure_segments, fixed_or_na(s.mean_seizure_seconds, 2).c_str(),
              fixed_or_na(s.type1_percent, 2).c_str(), fixed_or_na(s.type2_percent, 2).c_str(),
              fixed_or_na(s.type3_percent, 2).c_str());
  return 0;
}

int cmd_train(const CommonFlags& f) {
  const auto c = resolve(f);
  const auto corpus = experiment::load_corpus(c);
  write_config_copy(c);
  const auto req = experiment::cv_request(c, corpus, c.model, c.seg_len);
  const auto pool = corpus.plan(c.seg_len);
  const auto r = experiment::run_round(corpus, pool, req, 0, c.out, make_log(f));
  if (!r.ok) {
    std::fprintf(stderr, "training failed: %s\n", r.message.c_str());
    return 1;
  }
  std::printf("%s: best epoch %zu, test accuracy %s, sensitivity %s, specificity %s\n",
              req.spec.name().c_str(), r.best_epoch, fixed_or_na(r.metrics.accuracy, 4).c_str(),
              fixed_or_na(r.metrics.sensitivity, 4).c_str(), fixed_or_na(r.metrics.specificity, 4).c_str());
  return 0;
}

int cmd_cv(const CommonFlags& f) {
  const auto c = resolve(f);
  const auto corpus = experiment::load_corpus(c);
  write_config_copy(c);
  const auto r = experiment::run_cv(corpus, experiment::cv_request(c, corpus, c.model, c.seg_len), make_log(f));
  print_summary(r);
  return r.summary ? 0 : 1;
}

int cmd_sweep(const CommonFlags& f, const std::vector<double>& lengths) {
  auto c = resolve(f);
  if (!lengths.empty()) c.sweep.lengths = lengths;
  const auto corpus = experiment::load_corpus(c);
  write_config_copy(c);
  const auto rows = experiment::run_sweep(corpus, c, make_log(f));
  for (const auto& row : rows) {
    std::printf("L = %6s s  %-8s", shortest(row.seg_len).c_str(), row.status.c_str());
    if (row.cv && row.cv->summary) {
      std::printf(" acc %s +- %s", fixed_or_na(row.cv->summary->accuracy().mean, 4).c_str(),
                  fixed_or_na(row.cv->summary->accuracy().stddev, 4).c_str());
    }
    if (!row.message.empty()) std::printf("  %s", row.message.c_str());
    std::printf("\n");
  }
  return 0;
}

int cmd_attention(const CommonFlags& f, const std::string& checkpoint, const std::string& split) {
  const auto c = resolve(f);
  const auto corpus = experiment::load_corpus(c);
  const auto ck = model::load_checkpoint<double>(checkpoint);
  if (!ck.spec.use_attention) throw ConfigError("checkpoint " + checkpoint + " has no attention layer");
  const auto pool = corpus.plan(c.seg_len);
  std::vector<data::SegmentInfo> chosen;
  if (split == "all") {
    chosen = pool;
  } else {
    const auto ds = data::assemble_dataset(
        pool, [](const data::SegmentInfo& s) { return s.label_index(); },
        derive_seed(derive_seed(c.seed, 0), 0));
    chosen = split == "train" ? ds.train : split == "val" ? ds.val : ds.test;
  }
  if (chosen.empty()) throw DataError("no segments in split '" + split + "'");
  const auto segs = corpus.materialize(chosen, c.decimate);
  Tensor<double> weights({segs.size(), corpus.channels().size()});
  for (std::size_t lo = 0; lo < segs.size(); lo += 64) {
    const std::size_t hi = std::min(segs.size(), lo + 64);
    const std::vector<data::SegmentRef> batch(segs.begin() + lo, segs.begin() + hi);
    const auto w = model::extract_attention_weights(ck.params, data::stack_segments<double>(batch));
    std::copy(w.values().begin(), w.values().end(), weights.data() + lo * weights.dim(1));
  }
  experiment::detail::write_text(c.out / "attention.csv",
                                 experiment::attention_csv(segs, weights, corpus.channels()));
  std::printf("wrote %zu rows to %s\n", segs.size(), (c.out / "attention.csv").string().c_str());
  return 0;
}

int cmd_gradcheck(std::size_t seeds) {
  std::vector<std::uint64_t> s;
  for (std::size_t i = 1; i <= seeds; ++i) s.push_back(i);
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  for (const auto& r : gradcheck::run_suite(s)) {
    std::printf("%-10s seed %-3llu max rel error %.3e  checked %-4zu skipped %-3zu %s\n", r.name.c_str(),
                static_cast<unsigned long long>(r.seed), r.max_rel_error, r.checked, r.skipped,
                r.passed() ? "ok" : ("FAIL at " + r.worst).c_str());
    ok = ok && r.passed();
  }
  std::printf("%.2f s\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return ok ? 0 : 1;
}

int cmd_synth(const CommonFlags& f) {
  const auto c = resolve(f);
  const auto corpus = data::make_synthetic_corpus(c.data.synthetic);
  for (const auto& [id, rec] : corpus.records) data::write_edf_file(c.out / (id + ".edf"), rec);
  experiment::detail::write_text(c.out / "annotations.csv", data::to_csv(corpus.annotations));
  std::printf("wrote %zu EDF files and annotations.csv to %s\n", corpus.records.size(),
              c.out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ADIndRNN seizure classifier: data preparation, training and evaluation"};
  app.require_subcommand(1);

  CommonFlags f;
  auto* seg = app.add_subcommand("segment", "cut records into segments, write statistics and cache");
  add_common(seg, f);
  auto* train = app.add_subcommand("train", "train and test one model on one split");
  add_common(train, f);
  auto* cv = app.add_subcommand("cv", "repeated random sub-sampling cross-validation");
  add_common(cv, f);
  auto* sweep = app.add_subcommand("sweep", "cross-validation at several segment lengths");
  add_common(sweep, f);
  std::vector<double> lengths;
  sweep->add_option("--lengths", lengths, "segment lengths in seconds");
  auto* att = app.add_subcommand("attention", "dump per-segment channel attention weights");
  add_common(att, f);
  std::string checkpoint, split = "test";
  att->add_option("--checkpoint", checkpoint, "checkpoint stem or .json path")->required();
  att->add_option("--split", split, "segments to dump")->check(CLI::IsMember({"train", "val", "test", "all"}));
  auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  std::size_t seeds = 5;
  gc->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);
  auto* synth = app.add_subcommand("synth", "write a synthetic EDF corpus with annotations");
  add_common(synth, f);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*seg) return cmd_segment(f);
    if (*train) return cmd_train(f);
    if (*cv) return cmd_cv(f);
    if (*sweep) return cmd_sweep(f, lengths);
    if (*att) return cmd_attention(f, checkpoint, split);
    if (*gc) return cmd_gradcheck(seeds);
    if (*synth) return cmd_synth(f);
  } catch (const adindrnn::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
