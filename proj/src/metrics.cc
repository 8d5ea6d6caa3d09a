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
#include <numeric>

#include "hapredict/error.h"

namespace hapredict {
namespace {

void CheckPaired(std::span<const double> pred, std::span<const double> truth,
                 size_t min_size) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorKind::kInvalidArgument, "prediction/label length mismatch");
  }
  if (pred.size() < min_size) {
    throw Error(ErrorKind::kInvalidArgument,
                min_size == 1 ? "metric of empty input"
                              : "correlation needs at least two pairs");
  }
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double ScoreAverage(double score_small, double score_large, double weight_small,
                    double weight_large) {
  if (!(weight_small >= 0.0) || !(weight_large >= 0.0) ||
      !(weight_small + weight_large > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "judge weights must be >= 0, not both 0");
  }
  if (weight_small == weight_large) return (score_small + score_large) / 2.0;
  const double total = weight_small + weight_large;
  return (weight_small * score_small + weight_large * score_large) / total;
}

double Rmse(std::span<const double> pred, std::span<const double> truth) {
  CheckPaired(pred, truth, 1);
  double sum = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double Lcc(std::span<const double> pred, std::span<const double> truth) {
  CheckPaired(pred, truth, 2);
  const double mp = Mean(pred);
  const double mt = Mean(truth);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double dx = pred[i] - mp;
    const double dy = truth[i] - mt;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::kUndefinedCorrelation,
                "correlation undefined for a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double Srcc(std::span<const double> pred, std::span<const double> truth) {
  CheckPaired(pred, truth, 2);
  const auto rp = AverageRanks(pred);
  const auto rt = AverageRanks(truth);
  return Lcc(rp, rt);
}

double RelativeImprovement(double rmse_baseline, double rmse_candidate) {
  if (!(rmse_baseline > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "baseline RMSE must be positive");
  }
  return 100.0 * (rmse_baseline - rmse_candidate) / rmse_baseline;
}

}  // namespace hapredict
