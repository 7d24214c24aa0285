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


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "adindrnn/experiment/config.hpp"
#include "adindrnn/experiment/runner.hpp"

namespace adindrnn::experiment {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("adindrnn_exp_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (ch == '"') {
        if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = !quoted;
        }
      } else if (ch == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += ch;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Small, fast experiment on generated data.
nlohmann::json small_config_json() {
  return nlohmann::json::parse(R"J({
    "data": {"source": "synthetic",
             "synthetic": {"records": 3, "duration": 240, "rate": 16, "channels": 3,
                           "informative_channels": 2, "seizures_per_record": 3,
                           "seizure_min": 8, "seizure_max": 30, "seed": 2}},
    "seg_len": 4,
    "model": {"name": "ADIndRNN-(2,1)", "state_sizes": [6, 6], "fc_sizes": [8, 2]},
    "train": {"epochs": 4, "batch_size": 8, "learning_rate": 0.005},
    "rounds": 3,
    "seed": 11
  })J");
}

ExperimentConfig small_config(const fs::path& out) {
  auto c = experiment_config_from_json(small_config_json());
  c.out = out;
  return c;
}

// ---- config ----

TEST(ConfigTest, DefaultsFollowTheProtocol) {
  const ExperimentConfig c = experiment_config_from_json(nlohmann::json::object());
  EXPECT_EQ(c.seg_len, 23.0);
  EXPECT_EQ(c.rounds, 10u);
  EXPECT_EQ(c.model, "ADIndRNN-(3,3)");
  EXPECT_EQ(c.train.learning_rate, 0.0004);
  EXPECT_EQ(c.train.batch_size, 30u);
  EXPECT_EQ(c.train.epochs, 60u);
  EXPECT_EQ(c.train.weight_decay, 0.01);
  EXPECT_EQ(c.sweep.model, "IndRNN-12");
  EXPECT_EQ(c.sweep.lengths,
            (std::vector<double>{23, 30, 35, 40, 45, 50, 55, 60, 70, 80, 90, 100, 110}));
}

TEST(ConfigTest, ParsesFileWithCommentsAndRelativePaths) {
  TempDir dir;
  std::ofstream(dir.path() / "cfg.json") << R"({
    // EDF data next to the config
    "data": {"source": "edf", "root": "eeg", "annotations": "ann.csv",
             "exclude": ["chb12_27"], "channels": ["FP1-F7", "F7-T7"]},
    "seg_len": 30, "rounds": 2, "out": "runs/x",
    "sweep": {"lengths": [20, 40], "overrides": {"40": {"epochs": 5}}}
  })";
  ::unsetenv(kDataRootEnv);
  const auto c = load_experiment_config(dir.path() / "cfg.json");
  EXPECT_EQ(c.data.root, dir.path() / "eeg");
  EXPECT_EQ(c.data.annotations, dir.path() / "ann.csv");
  EXPECT_EQ(c.out, dir.path() / "runs/x");
  EXPECT_EQ(c.data.exclude, (std::vector<std::string>{"chb12_27"}));
  EXPECT_EQ(c.seg_len, 30.0);
  EXPECT_EQ(c.sweep.overrides.at(40.0)["epochs"], 5);

  ::setenv(kDataRootEnv, "/elsewhere", 1);
  EXPECT_EQ(load_experiment_config(dir.path() / "cfg.json").data.root, fs::path("/elsewhere"));
  ::unsetenv(kDataRootEnv);

  // what to_json writes reads back the same
  const auto back = experiment_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
}

TEST(ConfigTest, InvalidConfigsAreRejected) {
  EXPECT_THROW(experiment_config_from_json({{"rounds", 0}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"seg_len", -1}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"data", {{"source", "edf"}}}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"train", {{"learning_rate", 0}}}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"rounds", "ten"}}), ConfigError);
  EXPECT_THROW(experiment_config_from_json({{"sweep", {{"overrides", {{"long", {}}}}}}}), ConfigError);
  TempDir dir;
  std::ofstream(dir.path() / "bad.json") << "{\"rounds\": ";
  EXPECT_THROW(load_experiment_config(dir.path() / "bad.json"), ParseError);
  EXPECT_THROW(load_experiment_config(dir.path() / "missing.json"), ConfigError);
}

// ---- cross-validation ----

TEST(CvTest, SingleRoundHasZeroSpread) {
  TempDir dir;
  auto c = small_config(dir.path());
  c.rounds = 1;
  const auto corpus = load_corpus(c);
  const auto r = run_cv(corpus, cv_request(c, corpus, c.model, c.seg_len));
  ASSERT_TRUE(r.summary.has_value());
  for (const auto& m : r.summary->metrics) {
    if (m.defined) {
      EXPECT_EQ(*m.stddev, 0.0);
    }
  }
  EXPECT_TRUE(fs::exists(dir.path() / "rounds" / "round_00" / "curve.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "rounds" / "round_00" / "metrics.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "rounds" / "round_00" / "model.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "rounds" / "round_00" / "model.bin"));
  EXPECT_EQ(read_csv(dir.path() / "rounds" / "round_00" / "curve.csv").size(), 5u);
}

TEST(CvTest, RunsAreReproducibleAndIndependentOfThreadCount) {
  TempDir dir;
  auto a = small_config(dir.path() / "a");
  auto b = small_config(dir.path() / "b");
  b.jobs = 3;
  const auto corpus = load_corpus(a);
  run_cv(corpus, cv_request(a, corpus, a.model, a.seg_len));
  run_cv(corpus, cv_request(b, corpus, b.model, b.seg_len));
  for (const char* f : {"rounds.csv", "summary.csv", "rounds/round_02/curve.csv"}) {
    EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
  }
}

TEST(CvTest, SummaryIsRecomputableFromRoundRows) {
  TempDir dir;
  const auto c = small_config(dir.path());
  const auto corpus = load_corpus(c);
  run_cv(corpus, cv_request(c, corpus, c.model, c.seg_len));

  const auto rows = read_csv(dir.path() / "rounds.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][11], "sensitivity");
  const auto summary = read_csv(dir.path() / "summary.csv");
  ASSERT_EQ(summary.size(), 6u);
  for (std::size_t m = 0; m < 5; ++m) {
    std::vector<double> v;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      ASSERT_EQ(rows[r][1], "ok");
      // counts must agree with the metric cells
      const double tp = std::stod(rows[r][7]), fp = std::stod(rows[r][8]), tn = std::stod(rows[r][9]),
                   fn = std::stod(rows[r][10]);
      if (m == 4) {
        EXPECT_DOUBLE_EQ(std::stod(rows[r][15]), (tp + tn) / (tp + fp + tn + fn));
      }
      if (rows[r][11 + m] != "NA") v.push_back(std::stod(rows[r][11 + m]));
    }
    EXPECT_EQ(summary[m + 1][0], training::metric_names()[m]);
    EXPECT_EQ(std::stoul(summary[m + 1][3]), v.size());
    if (v.empty()) continue;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    EXPECT_NEAR(std::stod(summary[m + 1][1]), mean, 1e-12);
    EXPECT_NEAR(std::stod(summary[m + 1][2]), std::sqrt(var / static_cast<double>(v.size())), 1e-12);
  }
  const auto js = nlohmann::json::parse(slurp(dir.path() / "summary.json"));
  EXPECT_EQ(js["rounds"], 3);
  EXPECT_EQ(js["succeeded"], 3);
  EXPECT_EQ(js["model"], "ADIndRNN-(2,1)");
}

TEST(CvTest, LearnsTheSyntheticCorpus) {
  TempDir dir;
  auto c = small_config(dir.path());
  c.train.epochs = 15;
  const auto corpus = load_corpus(c);
  const auto r = run_cv(corpus, cv_request(c, corpus, c.model, c.seg_len));
  EXPECT_GE(*r.summary->accuracy().mean, 0.8);
}

TEST(CvTest, FailedRoundIsReportedAndRunContinues) {
  TempDir dir;
  auto c = small_config(dir.path());
  c.rounds = 2;
  c.train.learning_rate = 1e30;  // parameters blow up within the first epoch
  const auto corpus = load_corpus(c);
  const auto r = run_cv(corpus, cv_request(c, corpus, c.model, c.seg_len));
  EXPECT_EQ(r.rounds.size(), 2u);
  const auto rows = read_csv(dir.path() / "rounds.csv");
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_EQ(rows[i].size(), rows[0].size());
    if (rows[i][1] == "failed") {
      EXPECT_FALSE(rows[i].back().empty());
    }
  }
  EXPECT_TRUE(fs::exists(dir.path() / "summary.json"));
}

TEST(CvTest, ChannelCountMismatchIsAConfigError) {
  TempDir dir;
  auto c = small_config(dir.path());
  c.model = {{"name", "IndRNN-2"}, {"channels", 5}};
  const auto corpus = load_corpus(c);
  EXPECT_THROW(cv_request(c, corpus, c.model, c.seg_len), ConfigError);
}

// ---- sweep ----

TEST(SweepTest, FixedLengthAlignedSeizures) {
  // every seizure lasts exactly 10 s and starts on a multiple of 40 s, so it
  // sits inside one window at L = 20 and at L = 40
  TempDir dir;
  auto c = experiment_config_from_json(nlohmann::json::parse(R"J({
    "data": {"synthetic": {"records": 2, "duration": 400, "rate": 8, "channels": 2,
                           "informative_channels": 1, "seizures_per_record": 2,
                           "seizure_min": 10, "seizure_max": 10, "align": 40, "seed": 3}},
    "rounds": 1,
    "train": {"epochs": 1, "batch_size": 8},
    "sweep": {"lengths": [20, 40, 500], "model": {"name": "IndRNN-2", "state_sizes": [4, 4], "fc_sizes": [4, 2]},
              "overrides": {"40": {"epochs": 2}}}
  })J"));
  c.out = dir.path();
  const auto corpus = load_corpus(c);
  const auto rows = run_sweep(corpus, c);
  ASSERT_EQ(rows.size(), 3u);
  ASSERT_TRUE(rows[0].statistics && rows[1].statistics);
  EXPECT_EQ(*rows[0].statistics->mean_seizure_seconds, 10.0);
  EXPECT_EQ(*rows[1].statistics->mean_seizure_seconds, 10.0);
  EXPECT_EQ(rows[0].statistics->seizure_segments, 4u);
  EXPECT_EQ(rows[1].statistics->seizure_segments, 4u);
  const auto n20 = corpus.plan(20).size(), n40 = corpus.plan(40).size();
  EXPECT_LE(n20 > 2 * n40 ? n20 - 2 * n40 : 2 * n40 - n20, 2u);

  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_EQ(rows[1].cv->rounds[0].curve.size(), 2u);  // per-length override
  EXPECT_EQ(rows[2].status, "skipped");
  EXPECT_NE(rows[2].message.find("warning"), std::string::npos);

  const auto results = read_csv(dir.path() / "sweep_results.csv");
  const auto stats = read_csv(dir.path() / "sweep_statistics.csv");
  ASSERT_EQ(results.size(), 4u);
  ASSERT_EQ(stats.size(), 4u);
  for (const auto& r : results) EXPECT_EQ(r.size(), results[0].size());
  for (const auto& r : stats) EXPECT_EQ(r.size(), stats[0].size());
  EXPECT_EQ(stats[1][3], "10");
  EXPECT_EQ(stats[3][1], "skipped");
  EXPECT_TRUE(fs::exists(dir.path() / "L_20" / "summary.json"));
  EXPECT_FALSE(fs::exists(dir.path() / "L_500"));
}

TEST(SweepTest, HeadersAreFixed) {
  EXPECT_EQ(std::string(statistics_csv_header()),
            "seg_len,status,seizure_segments,mean_seizure_seconds,type1_percent,type2_percent,"
            "type3_percent,message\n");
  EXPECT_EQ(std::string(rounds_csv_header()).substr(0, 30), "round,status,seed,train_size,v");
  EXPECT_EQ(csv_escape("a,\"b\""), "\"a,\"\"b\"\"\"");
}

// ---- command line ----

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const char* cli = std::getenv("ADINDRNN_CLI");
    if (!cli) GTEST_SKIP() << "ADINDRNN_CLI not set";
    cli_ = cli;
    ::unsetenv(kDataRootEnv);
  }
  int run(const std::string& args) {
    const std::string cmd = "\"" + cli_ + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string cli_;
};

TEST_F(CliTest, CvTwiceIsByteIdentical) {
  TempDir dir;
  std::ofstream(dir.path() / "cfg.json") << small_config_json().dump();
  const std::string cfg = (dir.path() / "cfg.json").string();
  ASSERT_EQ(run("cv -q --config " + cfg + " --rounds 2 --out " + (dir.path() / "a").string()), 0);
  ASSERT_EQ(run("cv -q --config " + cfg + " --rounds 2 --out " + (dir.path() / "b").string()), 0);
  for (const char* f : {"rounds.csv", "summary.csv", "summary.json", "rounds/round_01/curve.csv"}) {
    EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
  }
  EXPECT_EQ(read_csv(dir.path() / "a" / "rounds.csv").size(), 3u);
  const auto written = nlohmann::json::parse(slurp(dir.path() / "a" / "config.json"));
  EXPECT_EQ(written["rounds"], 2);
}

TEST_F(CliTest, SynthSegmentTrainAttention) {
  TempDir dir;
  const auto d = dir.path();
  auto j = small_config_json();
  std::ofstream(d / "synth.json") << j.dump();
  ASSERT_EQ(run("synth -q --config " + (d / "synth.json").string() + " --out " + (d / "edf").string()), 0);
  EXPECT_TRUE(fs::exists(d / "edf" / "synth01.edf"));

  j["data"] = {{"source", "edf"}, {"root", "edf"}, {"annotations", "edf/annotations.csv"}, {"cache_dir", "cache"}};
  std::ofstream(d / "edf.json") << j.dump();
  const std::string cfg = " --config " + (d / "edf.json").string();
  ASSERT_EQ(run("segment -q" + cfg + " --out " + (d / "seg").string()), 0);
  const auto stats = read_csv(d / "seg" / "statistics.csv");
  ASSERT_EQ(stats.size(), 2u);
  EXPECT_EQ(stats[1][1], "ok");
  EXPECT_FALSE(fs::is_empty(d / "cache"));

  ASSERT_EQ(run("train -q" + cfg + " --out " + (d / "train").string()), 0);
  ASSERT_TRUE(fs::exists(d / "train" / "model.json"));
  ASSERT_EQ(run("attention -q" + cfg + " --checkpoint " + (d / "train" / "model").string() + " --out " +
                (d / "att").string()),
            0);
  const auto rows = read_csv(d / "att" / "attention.csv");
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(rows[0].size(), 3u + 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 3; k < rows[i].size(); ++k) {
      const double w = std::stod(rows[i][k]);
      EXPECT_GE(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST_F(CliTest, ErrorsGiveNonZeroStatus) {
  TempDir dir;
  EXPECT_EQ(run("cv -q --config " + (dir.path() / "missing.json").string()), 2);
  EXPECT_NE(run("bogus"), 0);
  EXPECT_EQ(run("gradcheck --seeds 1"), 0);
}

}  // namespace
}  // namespace adindrnn::experiment
