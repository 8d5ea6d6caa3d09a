// Copyright 2026 The hapredict Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hapredict/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "hapredict/error.h"
#include "metric_oracle.h"

namespace hapredict {
namespace {

using V = std::vector<double>;

void ExpectKind(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind);
  }
}

TEST(ScoreAverage, Examples) {
  EXPECT_EQ(ScoreAverage(60, 80), 70);
  EXPECT_EQ(ScoreAverage(37.5, 37.5), 37.5);
  EXPECT_EQ(ScoreAverage(0, 100), 50);
  EXPECT_EQ(ScoreAverage(20, 80, 3, 1), 35);
  EXPECT_THROW(ScoreAverage(1, 2, 0, 0), Error);
  EXPECT_THROW(ScoreAverage(1, 2, -1, 2), Error);
}

TEST(ScoreAverage, CommutesAndStaysBetween) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> score(0, 100);
  for (int i = 0; i < 1000; ++i) {
    const double a = score(rng), b = score(rng);
    EXPECT_EQ(ScoreAverage(a, b), ScoreAverage(b, a));
    EXPECT_GE(ScoreAverage(a, b), std::min(a, b));
    EXPECT_LE(ScoreAverage(a, b), std::max(a, b));
  }
}

TEST(Rmse, Examples) {
  EXPECT_EQ(Rmse(V{1, 2, 3}, V{1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(Rmse(V{20, 40, 60}, V{30, 50, 50}), 10.0);
  EXPECT_EQ(Rmse(V{0}, V{100}), 100.0);
  ExpectKind(ErrorKind::kInvalidArgument, [] { Rmse(V{}, V{}); });
  ExpectKind(ErrorKind::kInvalidArgument, [] { Rmse(V{1}, V{1, 2}); });
}

TEST(Lcc, Examples) {
  EXPECT_DOUBLE_EQ(Lcc(V{1, 2, 3}, V{2, 4, 6}), 1.0);
  EXPECT_DOUBLE_EQ(Lcc(V{1, 2, 3}, V{6, 4, 2}), -1.0);
  ExpectKind(ErrorKind::kUndefinedCorrelation, [] { Lcc(V{1, 1, 1}, V{1, 2, 3}); });
  ExpectKind(ErrorKind::kUndefinedCorrelation, [] { Lcc(V{1, 2, 3}, V{5, 5, 5}); });
  ExpectKind(ErrorKind::kInvalidArgument, [] { Lcc(V{1}, V{2}); });
}

TEST(Srcc, Examples) {
  EXPECT_DOUBLE_EQ(Srcc(V{1, 5, 9, 10}, V{-3, 0, 0.5, 100}), 1.0);
  // Ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4): 4.5 / sqrt(22.5).
  EXPECT_NEAR(Srcc(V{1, 2, 2, 3}, V{1, 2, 3, 4}), 4.5 / std::sqrt(22.5), 1e-12);
  EXPECT_NEAR(Srcc(V{1, 2, 2, 3}, V{1, 2, 3, 4}), 0.9487, 1e-4);
  EXPECT_DOUBLE_EQ(Srcc(V{1, 2, 3, 4}, V{4, 3, 2, 1}), -1.0);
  ExpectKind(ErrorKind::kUndefinedCorrelation, [] { Srcc(V{2, 2}, V{1, 2}); });
}

TEST(AverageRanks, Ties) {
  EXPECT_EQ(AverageRanks(V{10, 20, 20, 5}), (V{2, 3.5, 3.5, 1}));
}

TEST(RelativeImprovement, Examples) {
  EXPECT_NEAR(RelativeImprovement(37.019, 34.767), 6.0833, 0.001);
  EXPECT_EQ(RelativeImprovement(12.5, 12.5), 0.0);
  EXPECT_EQ(RelativeImprovement(100, 50), 50.0);
  ExpectKind(ErrorKind::kInvalidArgument, [] { RelativeImprovement(0, 1); });
  ExpectKind(ErrorKind::kInvalidArgument, [] { RelativeImprovement(-1, 1); });
}

class RandomPairs : public ::testing::Test {
 protected:
  std::mt19937 rng_{2024};

  std::pair<V, V> Draw() {
    std::uniform_int_distribution<int> len(2, 305);
    std::uniform_real_distribution<double> score(0, 100);
    std::bernoulli_distribution round(0.3);
    const int n = len(rng_);
    V p(n), t(n);
    for (int i = 0; i < n; ++i) {
      // Rounded draws give ties, as integer-valued labels do.
      p[i] = round(rng_) ? std::round(score(rng_) / 10) * 10 : score(rng_);
      t[i] = round(rng_) ? std::round(score(rng_)) : score(rng_);
    }
    return {p, t};
  }
};

TEST_F(RandomPairs, MatchBruteForceOracles) {
  for (int trial = 0; trial < 1000; ++trial) {
    auto [p, t] = Draw();
    EXPECT_NEAR(Rmse(p, t), oracle::Rmse(p, t), 1e-9);
    EXPECT_NEAR(Lcc(p, t), oracle::Pearson(p, t), 1e-9);
    EXPECT_NEAR(Srcc(p, t), oracle::Spearman(p, t), 1e-9);
  }
}

TEST_F(RandomPairs, InvariantUnderJointPermutation) {
  for (int trial = 0; trial < 200; ++trial) {
    auto [p, t] = Draw();
    std::vector<size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng_);
    V pp, tt;
    for (size_t i : idx) {
      pp.push_back(p[i]);
      tt.push_back(t[i]);
    }
    EXPECT_NEAR(Rmse(p, t), Rmse(pp, tt), 1e-9);
    EXPECT_NEAR(Lcc(p, t), Lcc(pp, tt), 1e-9);
    EXPECT_NEAR(Srcc(p, t), Srcc(pp, tt), 1e-12);
  }
}

TEST_F(RandomPairs, TransformInvariances) {
  for (int trial = 0; trial < 200; ++trial) {
    auto [p, t] = Draw();
    V monotone, affine;
    for (double v : p) {
      monotone.push_back(std::exp(v / 20.0) + v * v * v);
      affine.push_back(3.5 * v - 12.0);
    }
    EXPECT_NEAR(Srcc(monotone, t), Srcc(p, t), 1e-12);
    EXPECT_NEAR(Lcc(affine, t), Lcc(p, t), 1e-9);
  }
}

}  // namespace
}  // namespace hapredict
