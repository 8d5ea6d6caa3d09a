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

#include "hapredict/nalr.h"

#include <algorithm>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "hapredict/error.h"
#include "test_signals.h"

namespace hapredict {
namespace {

using testing::Db;
using testing::RelativeL2Error;
using testing::RmsOf;

constexpr int kRate = kProcessingRateHz;

TEST(Prescribe, FlatForty) {
  // X = 0.05 * 120 = 6; G = 6 + 12.4 + k.
  const Prescription p = Prescribe(Audiogram::Flat(40));
  const std::array<double, 6> expected = {1.4, 10.4, 19.4, 17.4, 16.4, 16.4};
  for (size_t i = 0; i < 6; ++i) EXPECT_NEAR(p.gains_db[i], expected[i], 1e-9);
}

TEST(Prescribe, FlatZeroClampsNegatives) {
  const Prescription p = Prescribe(Audiogram::Flat(0));
  EXPECT_THAT(p.gains_db, ::testing::ElementsAre(0, 0, 1, 0, 0, 0));
}

TEST(Prescribe, AffineNotProportional) {
  const Prescription p20 = Prescribe(Audiogram::Flat(20));
  const Prescription p40 = Prescribe(Audiogram::Flat(40));
  EXPECT_NE(p40.gains_db[2], 2 * p20.gains_db[2]);
}

TEST(Prescribe, MonotoneInEveryThreshold) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> level(-10.0, 110.0);
  const std::vector<double> freqs = {250, 500, 1000, 2000, 3000, 4000, 6000, 8000};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> levels(freqs.size());
    for (double& l : levels) l = level(rng);
    const Prescription base = Prescribe(Audiogram(freqs, levels));
    const size_t which = trial % freqs.size();
    levels[which] = std::min(120.0, levels[which] + 10.0);
    const Prescription raised = Prescribe(Audiogram(freqs, levels));
    for (size_t i = 0; i < 6; ++i) EXPECT_GE(raised.gains_db[i], base.gains_db[i]);
  }
}

TEST(Prescribe, InsufficientAudiogram) {
  try {
    Prescribe(Audiogram({4000, 8000}, {30, 40}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientAudiogram);
  }
}

TEST(DesignFir, ZeroGainIsNearUnitImpulse) {
  const FirFilter f = DesignFir(Prescription{}, kDefaultFirTaps, kRate);
  ASSERT_EQ(f.taps.size(), 221u);
  for (double hz = 100; hz <= 10000; hz *= 1.05) EXPECT_NEAR(f.MagnitudeDb(hz), 0.0, 0.5) << hz;
}

TEST(DesignFir, FlatFortyMatchesPrescription) {
  const Prescription p = Prescribe(Audiogram::Flat(40));
  const FirFilter f = DesignFir(p, kDefaultFirTaps, kRate);
  for (size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(f.MagnitudeDb(kPrescriptionFrequenciesHz[i]), p.gains_db[i], 1.0)
        << kPrescriptionFrequenciesHz[i];
  }
  EXPECT_NEAR(f.MagnitudeDb(1000), 19.4, 1.0);
}

TEST(DesignFir, TapsExactlySymmetric) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> level(0.0, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Audiogram a({250, 500, 1000, 2000, 4000, 8000},
                      {level(rng), level(rng), level(rng), level(rng), level(rng), level(rng)});
    for (int taps : {63, 221, 401}) {
      const FirFilter f = DesignFir(Prescribe(a), taps, kRate);
      for (int i = 0; i < taps; ++i) ASSERT_EQ(f.taps[i], f.taps[taps - 1 - i]);
    }
  }
}

TEST(DesignFir, RejectsBadLength) {
  EXPECT_THROW(DesignFir(Prescription{}, 220, kRate), Error);
  EXPECT_THROW(DesignFir(Prescription{}, 61, kRate), Error);
}

TEST(Compensate, NormalHearingNearPassthrough) {
  const auto x = testing::SpeechShapedNoise(kRate / 2, kRate, 0.1);
  const AudioSignal s = AudioSignal::Mono(x, kRate);
  const AudioSignal y = Compensate(s, Audiogram::Flat(0));
  ASSERT_EQ(y.num_frames(), s.num_frames());
  // The 1 dB prescription at 1 kHz sets the floor here.
  EXPECT_LT(Db(RelativeL2Error(y.channel(0), x)), -20.0);
}

TEST(Compensate, FlatZeroUnitFilterIsPassthrough) {
  // With all-zero gains the filter is a near-unit impulse.
  const auto x = testing::SpeechShapedNoise(kRate / 2, kRate, 0.1, 3);
  const FirFilter unit = DesignFir(Prescription{}, kDefaultFirTaps, kRate);
  EXPECT_LT(Db(RelativeL2Error(FilterCompensated(x, unit), x)), -40.0);
}

TEST(Compensate, ImpulsePeakStaysAligned) {
  for (double hl : {0.0, 40.0, 70.0}) {
    std::vector<double> impulse(4001, 0.0);
    impulse[2000] = 1.0;
    const AudioSignal y = Compensate(AudioSignal::Mono(impulse, kRate), Audiogram::Flat(hl));
    const auto out = y.channel(0);
    const auto peak = std::max_element(out.begin(), out.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    EXPECT_EQ(peak - out.begin(), 2000) << hl;
  }
}

TEST(Compensate, ToneGainMatchesPrescription) {
  const AudioSignal tone = testing::ToneAtLevel(1000, 60, 1.0);
  const AudioSignal y = Compensate(tone, Audiogram::Flat(40));
  const size_t margin = 1000;
  const double gain = Db(RmsOf(y.channel(0), margin, y.num_frames() - margin) /
                         RmsOf(tone.channel(0), margin, tone.num_frames() - margin));
  EXPECT_NEAR(gain, 19.4, 1.0);
}

TEST(Compensate, ParallelMatchesSerialReference) {
  const auto x = testing::SpeechShapedNoise(5000, kRate, 0.1, 5);
  const FirFilter f = DesignFir(Prescribe(Audiogram::Flat(50)), kDefaultFirTaps, kRate);
  const auto a = FilterCompensated(x, f);
  const auto b = reference::FilterCompensated(x, f);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-14);
}

TEST(Compensate, ShortInputs) {
  const FirFilter f = DesignFir(Prescribe(Audiogram::Flat(30)), kDefaultFirTaps, kRate);
  for (size_t n : {0u, 1u, 10u, 300u}) {
    std::vector<double> x(n, 0.5);
    EXPECT_EQ(FilterCompensated(x, f).size(), n);
    const auto a = FilterCompensated(x, f);
    const auto b = reference::FilterCompensated(x, f);
    for (size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
  }
}

TEST(SharedFittingFilter, Memoized) {
  const Audiogram a = Audiogram::Flat(35);
  EXPECT_EQ(SharedFittingFilter(a, kRate).get(), SharedFittingFilter(a, kRate).get());
  EXPECT_NE(SharedFittingFilter(a, kRate).get(),
            SharedFittingFilter(Audiogram::Flat(36), kRate).get());
}

}  // namespace
}  // namespace hapredict
