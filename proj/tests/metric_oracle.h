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

#ifndef HAPREDICT_TESTS_METRIC_ORACLE_H_
#define HAPREDICT_TESTS_METRIC_ORACLE_H_

#include <cmath>
#include <span>
#include <vector>

// Brute-force metric formulas kept independent of src/metrics.cc: raw-moment
// Pearson in long double and O(n^2) counting ranks.
namespace hapredict::oracle {

inline double Rmse(std::span<const double> p, std::span<const double> t) {
  long double sum = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const long double d = static_cast<long double>(p[i]) - t[i];
    sum += d * d;
  }
  return static_cast<double>(std::sqrt(sum / p.size()));
}

inline double Pearson(std::span<const double> x, std::span<const double> y) {
  const long double n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double num = n * sxy - sx * sy;
  const long double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  return static_cast<double>(num / den);
}

inline std::vector<double> CountingRanks(std::span<const double> x) {
  std::vector<double> r(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double below = 0, equal = 0;
    for (size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) below += 1;
      if (x[j] == x[i]) equal += 1;
    }
    r[i] = 1 + below + (equal - 1) / 2;
  }
  return r;
}

inline double Spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = CountingRanks(x);
  const auto ry = CountingRanks(y);
  return Pearson(rx, ry);
}

}  // namespace hapredict::oracle

#endif  // HAPREDICT_TESTS_METRIC_ORACLE_H_
