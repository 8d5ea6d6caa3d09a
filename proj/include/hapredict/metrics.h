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

#ifndef HAPREDICT_METRICS_H_
#define HAPREDICT_METRICS_H_

#include <span>
#include <vector>

namespace hapredict {

// Weighted mean of the two judge scores; weights are normalized to sum 1.
// The default is the plain arithmetic mean.
double ScoreAverage(double score_small, double score_large,
                    double weight_small = 0.5, double weight_large = 0.5);

// sqrt(mean((pred - truth)^2)). Lengths must match and be nonzero.
double Rmse(std::span<const double> pred, std::span<const double> truth);

// Pearson correlation. Throws kUndefinedCorrelation on constant input.
double Lcc(std::span<const double> pred, std::span<const double> truth);

// Pearson correlation of ranks; tied values share their mean rank.
double Srcc(std::span<const double> pred, std::span<const double> truth);

// 1-based ranks with ties averaged.
std::vector<double> AverageRanks(std::span<const double> values);

// 100 * (baseline - candidate) / baseline, in percent.
double RelativeImprovement(double rmse_baseline, double rmse_candidate);

}  // namespace hapredict

#endif  // HAPREDICT_METRICS_H_
