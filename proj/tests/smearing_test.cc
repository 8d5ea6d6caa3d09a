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

#include "hapredict/smearing.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "hapredict/error.h"
#include "hapredict/fft.h"
#include "test_signals.h"

namespace hapredict {
namespace {

using testing::RelativeL2Error;
using testing::Sine;
using testing::SpeechShapedNoise;

constexpr int kRate = kProcessingRateHz;

// Number of input bins whose weight in `row` lies within -30 dB of the row
// peak (weights are powers, so -30 dB is a factor 1e-3).
int SupportWidth(std::span<const double> row) {
  double peak = 0.0;
  for (double w : row) peak = std::max(peak, w);
  int count = 0;
  for (double w : row) count += w >= 1e-3 * peak ? 1 : 0;
  return count;
}

TEST(SmearMatrix, UnitBroadeningIsIdentity) {
  for (int nfft : {128, 512}) {
    const SmearMatrix m = BuildSmearMatrix({1.0, 1.0}, nfft, kRate);
    for (int r = 0; r < m.num_bins(); ++r) {
      for (int c = 0; c < m.num_bins(); ++c) {
        ASSERT_NEAR(m.at(r, c), r == c ? 1.0 : 0.0, 1e-6) << nfft << " " << r << " " << c;
      }
    }
  }
}

TEST(SmearMatrix, EntriesNonnegativeAndFinite) {
  for (Severity s : {Severity::kMild, Severity::kModerate, Severity::kSevere}) {
    const SmearMatrix m = BuildSmearMatrix(SmearParamsFor(s), kSmearFftSize, kRate);
    for (double e : m.entries()) {
      ASSERT_TRUE(std::isfinite(e));
      ASSERT_GE(e, 0.0);
    }
  }
}

TEST(SmearMatrix, SevereRowWiderThanMild) {
  const SmearMatrix mild = BuildSmearMatrix({1.6, 1.1}, kSmearFftSize, kRate);
  const SmearMatrix severe = BuildSmearMatrix({4.0, 2.0}, kSmearFftSize, kRate);
  const int bin = static_cast<int>(std::lround(1000.0 * kSmearFftSize / kRate));
  EXPECT_GT(SupportWidth(severe.row(bin)), SupportWidth(mild.row(bin)));
}

TEST(SmearMatrix, FlatSpectrumPowerPreserved) {
  // Direct row-sum accounting: M * 1 summed over output bins.
  for (SmearParams p : {SmearParams{1.0, 1.0}, SmearParams{1.6, 1.1},
                        SmearParams{2.4, 1.6}, SmearParams{4.0, 2.0},
                        SmearParams{3.0, 3.0}}) {
    const SmearMatrix m = BuildSmearMatrix(p, kSmearFftSize, kRate);
    double total = 0.0;
    for (double e : m.entries()) total += e;
    EXPECT_NEAR(total / m.num_bins(), 1.0, 0.10)
        << p.broaden_lower << "," << p.broaden_upper;
  }
}

TEST(SmearMatrix, ParameterTable) {
  EXPECT_EQ(SmearParamsFor(Severity::kNone).broaden_lower, 1.0);
  EXPECT_EQ(SmearParamsFor(Severity::kMild).broaden_lower, 1.6);
  EXPECT_EQ(SmearParamsFor(Severity::kMild).broaden_upper, 1.1);
  EXPECT_EQ(SmearParamsFor(Severity::kModerate).broaden_lower, 2.4);
  EXPECT_EQ(SmearParamsFor(Severity::kModerate).broaden_upper, 1.6);
  EXPECT_EQ(SmearParamsFor(Severity::kSevere).broaden_lower, 4.0);
  EXPECT_EQ(SmearParamsFor(Severity::kSevere).broaden_upper, 2.0);
}

TEST(SmearMatrix, RejectsBadArguments) {
  EXPECT_THROW(BuildSmearMatrix({1, 1}, 64, kRate), Error);
  EXPECT_THROW(BuildSmearMatrix({1, 1}, 500, kRate), Error);
  EXPECT_THROW(BuildSmearMatrix({0.5, 1}, 512, kRate), Error);
  EXPECT_THROW(BuildSmearMatrix({1, 1}, 512, 0), Error);
}

TEST(SmearMatrix, SharedInstancePerSeverity) {
  auto a = SharedSmearMatrix(Severity::kMild, kRate);
  auto b = SharedSmearMatrix(Severity::kMild, kRate);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(a->entries(), BuildSmearMatrix({1.6, 1.1}, 512, kRate).entries());
}

TEST(ApplySmearing, IdentityMatrixReconstructs) {
  const auto x = SpeechShapedNoise(3 * kRate, kRate, 0.1);
  const AudioSignal s = AudioSignal::Mono(x, kRate);
  const AudioSignal y = ApplySmearing(s, SmearMatrix::Identity(512, kRate));
  ASSERT_EQ(y.num_frames(), s.num_frames());
  EXPECT_LT(RelativeL2Error(y.channel(0), x), 1e-3);
  // -60 dB relative error.
  EXPECT_LT(20 * std::log10(RelativeL2Error(y.channel(0), x)), -60.0);
}

TEST(ApplySmearing, ZeroInZeroOut) {
  const AudioSignal z = AudioSignal::Mono(std::vector<double>(5000, 0.0), kRate);
  const AudioSignal y = ApplySmearing(z, *SharedSmearMatrix(Severity::kSevere, kRate));
  for (double v : y.channel(0)) ASSERT_EQ(v, 0.0);
}

TEST(ApplySmearing, ShortSignalKeepsLength) {
  for (size_t n : {0u, 1u, 100u, 511u, 513u}) {
    const AudioSignal s = AudioSignal::Mono(SpeechShapedNoise(n + 1, kRate, 0.1), kRate);
    const AudioSignal t = AudioSignal::Mono(std::vector<double>(s.channel(0).begin(), s.channel(0).begin() + n), kRate);
    EXPECT_EQ(ApplySmearing(t, *SharedSmearMatrix(Severity::kMild, kRate)).num_frames(), n);
  }
}

// Spectral width oracle: bins of a long Blackman-windowed FFT of the middle
// of the signal within -20 dB of the peak.
// White noise with the 2-3 kHz band removed.
std::vector<double> NotchedNoise(int n) {
  std::mt19937 rng(5);
  std::normal_distribution<double> gauss(0.0, 0.1);
  std::vector<double> x(n);
  for (double& v : x) v = gauss(rng);
  RealFft fft(n);
  std::vector<std::complex<double>> spec(fft.num_bins());
  fft.Forward(x, spec);
  for (size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * kRate / n;
    if (f >= 2000 && f <= 3000) spec[k] = 0.0;
  }
  fft.Inverse(spec, x);
  return x;
}

// Mean short-time power outside the notch over power at its centre, in dB.
double NotchDepthDb(std::span<const double> x) {
  const int n = 512;
  RealFft fft(n);
  std::vector<double> mean(fft.num_bins(), 0.0);
  std::vector<double> frame(n);
  std::vector<std::complex<double>> spec(fft.num_bins());
  for (size_t start = 2048; start + n + 2048 <= x.size(); start += 128) {
    for (int i = 0; i < n; ++i) {
      frame[i] = x[start + i] * (0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / n));
    }
    fft.Forward(frame, spec);
    for (size_t k = 0; k < spec.size(); ++k) mean[k] += std::norm(spec[k]);
  }
  auto bin = [&](double hz) { return static_cast<size_t>(std::lround(hz * n / kRate)); };
  double outside = 0.0;
  for (size_t k = bin(500); k <= bin(1500); ++k) outside += mean[k];
  outside /= static_cast<double>(bin(1500) - bin(500) + 1);
  return 10.0 * std::log10(outside / mean[bin(2500)]);
}

TEST(ApplySmearing, FillsSpectralNotch) {
  const AudioSignal noise = AudioSignal::Mono(NotchedNoise(kRate), kRate);
  const double original = NotchDepthDb(noise.channel(0));
  const double mild = NotchDepthDb(
      ApplySmearing(noise, *SharedSmearMatrix(Severity::kMild, kRate)).channel(0));
  const double severe = NotchDepthDb(
      ApplySmearing(noise, *SharedSmearMatrix(Severity::kSevere, kRate)).channel(0));
  EXPECT_LT(mild, original - 3.0);
  EXPECT_LT(severe, mild);
}

TEST(ApplySmearing, ParallelMatchesSerialReference) {
  const AudioSignal s = AudioSignal::Mono(SpeechShapedNoise(kRate / 2, kRate, 0.1, 21), kRate);
  for (Severity sev : {Severity::kMild, Severity::kSevere}) {
    const auto& m = *SharedSmearMatrix(sev, kRate);
    EXPECT_EQ(ApplySmearing(s, m), reference::ApplySmearing(s, m));
  }
}

TEST(ApplySmearing, Deterministic) {
  const AudioSignal s = AudioSignal::Mono(SpeechShapedNoise(20000, kRate, 0.1, 2), kRate);
  const auto& m = *SharedSmearMatrix(Severity::kModerate, kRate);
  EXPECT_EQ(ApplySmearing(s, m), ApplySmearing(s, m));
}

TEST(ApplySmearing, RejectsRateMismatch) {
  const AudioSignal s = AudioSignal::Mono(std::vector<double>(1000, 0.0), 16000);
  EXPECT_THROW(ApplySmearing(s, SmearMatrix::Identity(512, kRate)), Error);
}

}  // namespace
}  // namespace hapredict
