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


#include <array>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "adindrnn/core/rng.hpp"
#include "adindrnn/data/synthetic.hpp"
#include "adindrnn/training/adam.hpp"
#include "adindrnn/training/loss.hpp"
#include "adindrnn/training/metrics.hpp"
#include "adindrnn/training/trainer.hpp"

namespace adindrnn::training {
namespace {

using T = Tensor<double>;
using model::ModelParams;

ModelParams<double> single_weight(double theta) {
  ModelParams<double> p;
  p.fc.push_back({T({1, 1}, theta), T({1}, 0.0)});
  return p;
}

// ---- loss ----

TEST(LossTest, UniformLogitsGiveLn2) {
  const std::vector<int> y{0, 1, 1};
  const auto r = compute_loss(T({3, 2}, 0.7), y, ModelParams<double>{}, 0.0);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
  EXPECT_EQ(r.l2_loss, 0.0);
}

TEST(LossTest, ConfidentCorrectPredictionApproachesZero) {
  const std::vector<int> y{1, 0};
  const auto r = compute_loss(T({2, 2}, {-40, 40, 40, -40}), y, ModelParams<double>{}, 0.0);
  EXPECT_LT(r.loss, 1e-30);
}

TEST(LossTest, ZeroLogitsSingleWeightWithDecay) {
  const std::vector<int> y{1};
  const auto r = compute_loss(T({1, 2}), y, single_weight(2.0), 0.01);
  EXPECT_NEAR(r.loss, std::log(2.0) + 0.01 * 2.0, 1e-15);
  EXPECT_NEAR(r.l2_loss, 0.02, 1e-15);
}

TEST(LossTest, LogitGradientMatchesFiniteDifferences) {
  Rng rng(1);
  T logits({6, 2});
  for (auto& v : logits.values()) v = rng.normal(0.0, 2.0);
  const std::vector<int> y{0, 1, 1, 0, 1, 0};
  const auto r = compute_loss(logits, y, ModelParams<double>{}, 0.0);
  const double h = 1e-6;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    T plus = logits, minus = logits;
    plus[i] += h;
    minus[i] -= h;
    const double numeric = (compute_loss(plus, y, ModelParams<double>{}, 0.0).loss -
                            compute_loss(minus, y, ModelParams<double>{}, 0.0).loss) / (2 * h);
    EXPECT_LT(std::abs(r.logit_grads[i] - numeric) / std::max(std::abs(numeric), 1e-3), 1e-6) << i;
  }
}

TEST(LossTest, NonFiniteLogitsDiverge) {
  const std::vector<int> y{0};
  EXPECT_THROW(compute_loss(T({1, 2}, {NAN, 0.0}), y, ModelParams<double>{}, 0.0), TrainingDiverged);
  EXPECT_THROW(compute_loss(T({1, 2}), std::vector<int>{2}, ModelParams<double>{}, 0.0), DataError);
  EXPECT_THROW(compute_loss(T({2, 2}), y, ModelParams<double>{}, 0.0), DimensionError);
}

TEST(LossTest, WeightDecayMatchesIndependentSum) {
  const auto spec = model::make_dense_spec(true, 2, 2, 3, {4, 5});
  const auto p = model::build_model<double>(spec, 3);
  // walk the structure directly instead of through the visitor
  double sq = 0.0;
  auto add = [&](const T& t) {
    for (double v : t.values()) sq += v * v;
  };
  add(p.attention->kernel);
  add(p.attention->bias);
  for (const auto& b : p.blocks) {
    for (std::size_t l = 0; l < b.rnn.size(); ++l) {
      add(b.rnn[l].input_weights);
      add(b.rnn[l].recurrent_weights);
      add(b.rnn[l].hidden_bias);
      add(b.rnn[l].output_weights);
      add(b.rnn[l].output_bias);
      add(b.bn[l].gamma);
      add(b.bn[l].beta);
    }
  }
  for (const auto& f : p.fc) {
    add(f.weights);
    add(f.bias);
  }
  EXPECT_NEAR(l2_penalty(p, 0.01), 0.005 * sq, 1e-14 * sq);

  auto g = model::zeros_like(p);
  add_weight_decay(g, p, 0.01);
  EXPECT_EQ(g.fc[0].weights[3], 0.01 * p.fc[0].weights[3]);
  EXPECT_EQ(g.blocks[1].bn[0].gamma[2], 0.01 * p.blocks[1].bn[0].gamma[2]);
}

// ---- Adam ----

struct Scalar {
  T param{{1}, 0.0};
  T grad{{1}, 0.0};
  AdamState<double> state;

  void step(double g, const TrainConfig& cfg) {
    grad[0] = g;
    std::array<T*, 1> p{&param};
    std::array<const T*, 1> q{&grad};
    adam_step<double>(p, q, state, cfg);
  }
};

TEST(AdamTest, ZeroGradientLeavesParamsUnchanged) {
  Scalar s;
  s.param[0] = 1.25;
  s.step(0.0, TrainConfig{});
  s.step(0.0, TrainConfig{});
  EXPECT_EQ(s.param[0], 1.25);
  EXPECT_EQ(s.state.step, 2u);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  for (double g : {1e-3, 0.5, -7.0, 300.0}) {
    Scalar s;
    s.step(g, TrainConfig{});
    EXPECT_NEAR(s.param[0], -0.0004 * g / (std::abs(g) + 1e-8), 1e-15) << g;
    EXPECT_NEAR(std::abs(s.param[0]), 0.0004, 0.0004 * 1e-5) << g;
  }
}

TEST(AdamTest, TwoStepHandTrace) {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  Scalar s;
  s.step(1.0, cfg);
  s.step(1.0, cfg);
  // m1 = 0.1, v1 = 0.001, m2 = 0.19, v2 = 0.001999; both bias-corrected moments are 1
  const double m1 = 0.1, v1 = 0.001, m2 = 0.9 * m1 + 0.1, v2 = 0.999 * v1 + 0.001;
  const double u1 = 0.1 * (m1 / 0.1) / (std::sqrt(v1 / 0.001) + 1e-8);
  const double u2 = 0.1 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.999 * 0.999)) + 1e-8);
  EXPECT_NEAR(s.param[0], -u1 - u2, 1e-12);
  EXPECT_NEAR(s.param[0], -0.2, 1e-8);
}

TEST(AdamTest, ShapeMismatchThrows) {
  T p({2}), g({3});
  std::array<T*, 1> ps{&p};
  std::array<const T*, 1> gs{&g};
  AdamState<double> st;
  EXPECT_THROW(adam_step<double>(ps, gs, st, TrainConfig{}), DimensionError);
}

// ---- metrics ----

struct ReferenceRow {
  double sens, spec, f1, prec, acc;
};

// Ten cross-validation rows and their summary, 100 segments per class.
const std::array<ReferenceRow, 10> kRows{{{0.9100, 0.8500, 0.8835, 0.8585, 0.8800},
                                          {0.8600, 0.9300, 0.8912, 0.9247, 0.8950},
                                          {0.9100, 0.8700, 0.8922, 0.8750, 0.8900},
                                          {0.8500, 0.9200, 0.8808, 0.9140, 0.8850},
                                          {0.8600, 0.8600, 0.8600, 0.8600, 0.8600},
                                          {0.9000, 0.8900, 0.8955, 0.8911, 0.8950},
                                          {0.9300, 0.8800, 0.9073, 0.8857, 0.9050},
                                          {0.8700, 0.8800, 0.8744, 0.8788, 0.8750},
                                          {0.8900, 0.8700, 0.8812, 0.8725, 0.8800},
                                          {0.9000, 0.9100, 0.9045, 0.9091, 0.9050}}};
const ReferenceRow kMean{0.8880, 0.8860, 0.8871, 0.8869, 0.8870};
const ReferenceRow kStd{0.0252, 0.0250, 0.0134, 0.0215, 0.0133};

std::array<double, 5> as_array(const ReferenceRow& r) { return {r.sens, r.spec, r.f1, r.prec, r.acc}; }

TEST(MetricsTest, FirstReferenceRowFromCounts) {
  const std::vector<int> labels = [] {
    std::vector<int> v(200, 0);
    std::fill(v.begin(), v.begin() + 100, 1);
    return v;
  }();
  std::vector<int> pred(200, 0);
  for (int i = 0; i < 91; ++i) pred[i] = 1;         // tp 91, fn 9
  for (int i = 100; i < 115; ++i) pred[i] = 1;      // fp 15, tn 85
  const auto m = compute_metrics(pred, labels);
  EXPECT_EQ(m.tp, 91u);
  EXPECT_EQ(m.fn, 9u);
  EXPECT_EQ(m.tn, 85u);
  EXPECT_EQ(m.fp, 15u);
  EXPECT_NEAR(*m.sensitivity, 0.9100, 5e-5);
  EXPECT_NEAR(*m.specificity, 0.8500, 5e-5);
  EXPECT_NEAR(*m.precision, 0.8585, 5e-5);
  EXPECT_NEAR(*m.f1, 0.8835, 5e-5);
  EXPECT_NEAR(*m.accuracy, 0.8800, 5e-5);
}

TEST(MetricsTest, EveryReferenceRowFollowsFromItsCounts) {
  for (const auto& row : kRows) {
    const auto tp = static_cast<std::size_t>(std::lround(row.sens * 100));
    const auto tn = static_cast<std::size_t>(std::lround(row.spec * 100));
    const auto m = MetricsReport::from_counts(tp, 100 - tn, tn, 100 - tp);
    const auto cols = m.columns();
    const auto want = as_array(row);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(*cols[k], want[k], 5e-5) << row.sens << " col " << k;
  }
}

TEST(MetricsTest, AllCorrectIsPerfect) {
  const std::vector<int> y{1, 0, 1, 1, 0};
  for (const auto& v : compute_metrics(y, y).columns()) EXPECT_EQ(*v, 1.0);
}

TEST(MetricsTest, UndefinedMetricsHaveNoValue) {
  const std::vector<int> neg{0, 0, 0};
  const auto m = compute_metrics(neg, neg);
  EXPECT_FALSE(m.sensitivity.has_value());
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_FALSE(m.f1.has_value());
  EXPECT_EQ(*m.specificity, 1.0);
  EXPECT_EQ(*m.accuracy, 1.0);
  EXPECT_THROW(compute_metrics(std::vector<int>{1}, std::vector<int>{1, 0}), DimensionError);
}

TEST(MetricsTest, RandomConfusionMatricesMatchRecount) {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      p[i] = static_cast<int>(rng.below(2));
    }
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == 1) {
        (p[i] == 1 ? tp : fn) += 1;
      } else {
        (p[i] == 1 ? fp : tn) += 1;
      }
    }
    const auto m = compute_metrics(p, y);
    ASSERT_EQ(m.tp + m.fp + m.tn + m.fn, n);
    EXPECT_EQ(static_cast<double>(m.tp), tp);
    EXPECT_EQ(static_cast<double>(m.tn), tn);
    EXPECT_NEAR(*m.accuracy, (tp + tn) / n, 1e-15);
    auto check = [](const Metric& got, double num, double den) {
      if (den > 0) {
        EXPECT_NEAR(*got, num / den, 1e-15);
      } else {
        EXPECT_FALSE(got.has_value());
      }
    };
    check(m.sensitivity, tp, tp + fn);
    check(m.specificity, tn, tn + fp);
    check(m.precision, tp, tp + fp);
    if (tp > 0) {
      EXPECT_NEAR(*m.f1, 2 * tp / (2 * tp + fp + fn), 1e-12);
    }
  }
}

TEST(AggregateTest, ReferenceRowsReproduceSummary) {
  std::vector<MetricsReport> rounds;
  for (const auto& r : kRows) rounds.push_back(MetricsReport::from_values(r.sens, r.spec, r.f1, r.prec, r.acc));
  const auto s = aggregate_cv(rounds);
  const auto mean = as_array(kMean), sd = as_array(kStd);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(s.metrics[k].defined, 10u);
    EXPECT_NEAR(*s.metrics[k].mean, mean[k], 5e-5) << k;
    EXPECT_NEAR(*s.metrics[k].stddev, sd[k], 5e-5) << k;
  }
  // divide-by-N: the sample convention would not round to the reference value
  const double n = 10.0;
  EXPECT_GT(std::abs(*s.sensitivity().stddev * std::sqrt(n / (n - 1)) - kStd.sens), 5e-5);
}

TEST(AggregateTest, SingleAndIdenticalRounds) {
  const auto one = aggregate_cv({MetricsReport::from_counts(8, 1, 9, 2)});
  for (const auto& m : one.metrics) EXPECT_EQ(*m.stddev, 0.0);
  const auto r = MetricsReport::from_counts(5, 2, 7, 3);
  const auto same = aggregate_cv({r, r, r});
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(*same.metrics[k].mean, *r.columns()[k]);
    EXPECT_NEAR(*same.metrics[k].stddev, 0.0, 1e-15);
  }
  EXPECT_THROW(aggregate_cv({}), DataError);
}

TEST(AggregateTest, UndefinedValuesAreLeftOutPerMetric) {
  const auto s = aggregate_cv({MetricsReport::from_counts(0, 0, 5, 0), MetricsReport::from_counts(4, 0, 4, 1)});
  EXPECT_EQ(s.precision().defined, 1u);
  EXPECT_EQ(*s.precision().mean, 1.0);
  EXPECT_EQ(s.accuracy().defined, 2u);
}

// ---- training ----

class TrainerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data::SyntheticSegmentsSpec ds;
    ds.count = 120;
    ds.steps = 32;
    ds.channels = 2;
    ds.informative_channels = 1;
    ds.rate = 32.0;
    ds.seed = 5;
    const auto all = data::make_synthetic_segments(ds);
    train_ = new std::vector<data::SegmentRef>(all.begin(), all.begin() + 80);
    val_ = new std::vector<data::SegmentRef>(all.begin() + 80, all.end());
  }
  static void TearDownTestSuite() {
    delete train_;
    delete val_;
  }

  static model::ModelSpec spec() {
    auto s = model::make_dense_spec(false, 1, 1, 2, {8});
    s.fc_sizes = {8, 2};
    return s;
  }
  static TrainConfig config(std::size_t epochs) {
    TrainConfig c;
    c.epochs = epochs;
    c.batch_size = 16;
    c.learning_rate = 0.01;
    c.seed = 9;
    return c;
  }

  static std::vector<data::SegmentRef>* train_;
  static std::vector<data::SegmentRef>* val_;
};

std::vector<data::SegmentRef>* TrainerTest::train_ = nullptr;
std::vector<data::SegmentRef>* TrainerTest::val_ = nullptr;

template <typename U>
std::vector<U> flat(const ModelParams<U>& p) {
  std::vector<U> out;
  model::for_each_trainable(p, [&](const std::string&, const Tensor<U>& t) {
    out.insert(out.end(), t.values().begin(), t.values().end());
  });
  model::for_each_buffer(p, [&](const std::string&, const Tensor<U>& t) {
    out.insert(out.end(), t.values().begin(), t.values().end());
  });
  return out;
}

TEST_F(TrainerTest, ZeroEpochsReturnsInitialParams) {
  const auto r = train<double>(spec(), *train_, *val_, config(0));
  EXPECT_TRUE(r.curve.empty());
  EXPECT_EQ(r.best_epoch, 0u);
  EXPECT_EQ(flat(r.params), flat(model::build_model<double>(spec(), derive_seed(9, 0))));
}

TEST_F(TrainerTest, SameSeedIsBitIdentical) {
  const auto a = train<double>(spec(), *train_, *val_, config(3));
  const auto b = train<double>(spec(), *train_, *val_, config(3));
  ASSERT_EQ(a.curve.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.curve[i].train_loss, b.curve[i].train_loss);
    EXPECT_EQ(a.curve[i].val_loss, b.curve[i].val_loss);
  }
  EXPECT_EQ(flat(a.params), flat(b.params));
  auto other = config(3);
  other.seed = 10;
  EXPECT_NE(flat(train<double>(spec(), *train_, *val_, other).params), flat(a.params));
}

TEST_F(TrainerTest, LearnsSeparableDataAndLossFalls) {
  std::size_t calls = 0;
  const auto r = train<double>(spec(), *train_, *val_, config(20), std::nullopt,
                               [&](const EpochRecord&) { ++calls; });
  EXPECT_EQ(calls, 20u);
  EXPECT_GE(*r.best_val_accuracy, 0.95);

  // five-epoch moving average of the training loss never rises over the first epochs
  std::vector<double> ma;
  for (std::size_t e = 0; e + 5 <= 15; ++e) {
    double s = 0.0;
    for (std::size_t k = e; k < e + 5; ++k) s += r.curve[k].train_loss;
    ma.push_back(s / 5.0);
  }
  for (std::size_t i = 1; i < ma.size(); ++i) EXPECT_LE(ma[i], ma[i - 1]) << i;
}

TEST_F(TrainerTest, KeepsEarliestBestValidationEpoch) {
  const auto r = train<double>(spec(), *train_, *val_, config(8));
  double best = -1.0;
  std::size_t epoch = 0;
  for (const auto& e : r.curve) {
    if (*e.val_accuracy > best) {
      best = *e.val_accuracy;
      epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.best_epoch, epoch);
  EXPECT_EQ(*r.best_val_accuracy, best);
  EXPECT_EQ(*evaluate(spec(), r.params, *val_, 0.01).metrics.accuracy, best);
}

TEST_F(TrainerTest, WithoutValidationKeepsLastEpoch) {
  const auto r = train<double>(spec(), *train_, {}, config(2));
  EXPECT_EQ(r.best_epoch, 2u);
  EXPECT_FALSE(r.curve[1].val_accuracy.has_value());
}

TEST_F(TrainerTest, FloatPrecisionTrains) {
  const auto r = train<float>(spec(), *train_, *val_, config(10));
  EXPECT_GE(*r.best_val_accuracy, 0.9);
}

TEST_F(TrainerTest, DivergenceReportsWhereItHappened) {
  auto init = model::build_model<double>(spec(), 1);
  init.fc[0].weights[0] = NAN;
  try {
    train<double>(spec(), *train_, *val_, config(2), init);
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1, batch 1"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace adindrnn::training
