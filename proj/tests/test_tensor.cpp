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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "adindrnn/core/rng.hpp"
#include "adindrnn/tensor.hpp"

namespace adindrnn {
namespace {

using T = Tensor<double>;

T random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  T t({r, c});
  for (auto& v : t.values()) v = rng.normal();
  return t;
}

TEST(TensorTest, ConstructionChecksSizeAndExtents) {
  EXPECT_EQ(T({2, 3}).size(), 6u);
  EXPECT_THROW(T({2, 0}), DimensionError);
  EXPECT_THROW(T({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  const T a({2, 3, 4}, 1.5);
  EXPECT_EQ(a.rank(), 3u);
  EXPECT_EQ(a.at(1, 2, 3), 1.5);
  EXPECT_EQ(shape_size(a.shape()), a.values().size());
}

TEST(MatmulTest, IdentityLeavesMatrixUnchanged) {
  const T b({2, 2}, {5, 6, 7, 8});
  EXPECT_EQ(matmul(T::identity(2), b), b);
}

TEST(MatmulTest, SmallProduct) {
  const T a({2, 2}, {1, 2, 3, 4});
  const T b({2, 1}, {5, 6});
  EXPECT_EQ(matmul(a, b), T({2, 1}, {17, 39}));
}

TEST(MatmulTest, ZeroMatrixAnnihilates) {
  Rng rng(3);
  const T b = random_matrix(rng, 3, 4);
  EXPECT_EQ(matmul(T({2, 3}), b), T({2, 4}));
}

TEST(MatmulTest, MatchesTripleLoop) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.below(6), k = 1 + rng.below(6), n = 1 + rng.below(6);
    const T a = random_matrix(rng, m, k), b = random_matrix(rng, k, n);
    const T c = matmul(a, b);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += a.at(i, p) * b.at(p, j);
        EXPECT_NEAR(c.at(i, j), s, 1e-12);
      }
    }
  }
}

TEST(MatmulTest, ShapeMismatchNamesBothShapes) {
  try {
    matmul(T({2, 3}), T({2, 3}));
    FAIL() << "expected a DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos) << msg;
  }
}

TEST(MatmulTest, TransposedKernelsAgreeWithExplicitTranspose) {
  Rng rng(5);
  const T a = random_matrix(rng, 3, 4), b = random_matrix(rng, 5, 4), c = random_matrix(rng, 3, 5);
  T bt({4, 5});
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 4; ++j) bt.at(j, i) = b.at(i, j);
  }
  T nt({3, 5});
  kernels::gemm_nt(3, 4, 5, a.data(), b.data(), nt.data());
  const T ref = matmul(a, bt);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(nt[i], ref[i], 1e-12);

  T at({4, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) at.at(j, i) = a.at(i, j);
  }
  T tn({4, 5});
  kernels::gemm_tn(3, 4, 5, a.data(), c.data(), tn.data());
  const T ref2 = matmul(at, c);
  for (std::size_t i = 0; i < ref2.size(); ++i) EXPECT_NEAR(tn[i], ref2[i], 1e-12);
}

TEST(HadamardTest, Examples) {
  Rng rng(1);
  const T x = random_matrix(rng, 3, 4);
  EXPECT_EQ(hadamard(x, T::ones({3, 4})), x);
  EXPECT_EQ(hadamard(x, T({3, 4})), T({3, 4}));
  EXPECT_EQ(hadamard(T({2}, {1, 2}), T({2}, {3, 4})), T({2}, {3, 8}));
}

TEST(HadamardTest, BroadcastsVectorOverLastAxis) {
  const T a({2, 2, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const T v({3}, {1, 0, -1});
  const T r = hadamard(a, v);
  EXPECT_EQ(r.at(1, 1, 0), 10.0);
  EXPECT_EQ(r.at(1, 1, 1), 0.0);
  EXPECT_EQ(r.at(1, 1, 2), -12.0);
  EXPECT_THROW(hadamard(a, T({2})), DimensionError);
  EXPECT_THROW(hadamard(T({2, 3}), T({3, 2})), DimensionError);
}

TEST(HadamardTest, Commutes) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const T a = random_matrix(rng, 4, 5), b = random_matrix(rng, 4, 5);
    EXPECT_EQ(hadamard(a, b), hadamard(b, a));
  }
}

TEST(SoftmaxTest, Examples) {
  const T a = softmax_rows(T({3, 2}, {0, 0, 0, std::log(3.0), 1000, 1000}));
  EXPECT_DOUBLE_EQ(a.at(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(a.at(0, 1), 0.5);
  EXPECT_NEAR(a.at(1, 0), 0.25, 1e-15);
  EXPECT_NEAR(a.at(1, 1), 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(a.at(2, 0), 0.5);
  EXPECT_DOUBLE_EQ(a.at(2, 1), 0.5);
}

TEST(SoftmaxTest, RowsAreProbabilityVectorsAndShiftInvariant) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    T a = random_matrix(rng, 3, 6);
    for (auto& v : a.values()) v *= 5.0;
    const T s = softmax_rows(a);
    T shifted = a;
    const double c = rng.uniform(-100, 100);
    for (auto& v : shifted.values()) v += c;
    const T s2 = softmax_rows(shifted);
    for (std::size_t i = 0; i < 3; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_GT(s.at(i, j), 0.0);
        EXPECT_LT(s.at(i, j), 1.0);
        EXPECT_NEAR(s.at(i, j), s2.at(i, j), 1e-12);
        sum += s.at(i, j);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(MeanOverAxisTest, Examples) {
  EXPECT_EQ(mean_over_axis(T({2, 2}, {1, 3, 5, 7}), 0), T({2}, {3, 5}));
  EXPECT_EQ(mean_over_axis(T({2, 2}, {1, 3, 5, 7}), 1), T({2}, {2, 6}));
  EXPECT_EQ(mean_over_axis(T({3, 4, 2}, 2.5), 1), T({3, 2}, 2.5));
  const T x({2, 1, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(mean_over_axis(x, 1), T({2, 3}, {1, 2, 3, 4, 5, 6}));
  EXPECT_THROW(mean_over_axis(x, 3), DimensionError);
}

TEST(MeanOverAxisTest, OnesStayOnes) {
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const T m = mean_over_axis(T::ones({2, 3, 4}), axis);
    EXPECT_EQ(m.rank(), 2u);
    for (double v : m.values()) EXPECT_EQ(v, 1.0);
  }
}

TEST(FeatureAxisTest, ConcatThenSplitRoundTrips) {
  Rng rng(4);
  T a({2, 3, 2}), b({2, 3, 4});
  for (auto& v : a.values()) v = rng.normal();
  for (auto& v : b.values()) v = rng.normal();
  const T c = concat_features<double>({&a, &b});
  EXPECT_EQ(c.shape(), (Shape{2, 3, 6}));
  EXPECT_EQ(c.at(1, 2, 1), a.at(1, 2, 1));
  EXPECT_EQ(c.at(1, 2, 5), b.at(1, 2, 3));
  const auto parts = split_features(c, {2, 4});
  EXPECT_EQ(parts[0], a);
  EXPECT_EQ(parts[1], b);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(9, 3), derive_seed(9, 3));
}

TEST(RngTest, TruncatedNormalStaysWithinTwoSigma) {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.truncated_normal(0.0, 0.1);
    ASSERT_LE(std::abs(v), 0.2);
    sum += v;
  }
  EXPECT_NEAR(sum / 10000, 0.0, 0.005);
}

TEST(RngTest, BelowIsUniformEnough) {
  Rng rng(13);
  std::vector<int> counts(5);
  for (int i = 0; i < 50000; ++i) counts[rng.below(5)]++;
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

}  // namespace
}  // namespace adindrnn
