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
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <numbers>
#include <utility>

#include "hapredict/error.h"
#include "hapredict/fft.h"

namespace hapredict {
namespace {

constexpr std::array<double, 6> kNalrCorrectionDb = {-17, -8, 1, -1, -2, -2};

int NextPowerOfTwo(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

double GainAt(const Prescription& prescription, double frequency_hz) {
  const auto& f = kPrescriptionFrequenciesHz;
  const auto& g = prescription.gains_db;
  if (frequency_hz <= f.front()) return g.front();
  if (frequency_hz >= f.back()) return g.back();
  size_t hi = 1;
  while (f[hi] < frequency_hz) ++hi;
  const double t = std::log2(frequency_hz / f[hi - 1]) / std::log2(f[hi] / f[hi - 1]);
  return g[hi - 1] + t * (g[hi] - g[hi - 1]);
}

}  // namespace

double FirFilter::MagnitudeDb(double frequency_hz) const {
  const double w = 2.0 * std::numbers::pi * frequency_hz / sample_rate_hz;
  std::complex<double> h = 0.0;
  for (size_t i = 0; i < taps.size(); ++i) {
    h += taps[i] * std::polar(1.0, -w * static_cast<double>(i));
  }
  return 20.0 * std::log10(std::abs(h));
}

Prescription Prescribe(const Audiogram& audiogram) {
  const auto& f = audiogram.frequencies_hz();
  const bool covered = std::any_of(f.begin(), f.end(), [](double hz) {
    return hz >= 500.0 && hz <= 2000.0;
  });
  if (!covered) {
    throw Error(ErrorKind::kInsufficientAudiogram,
                "no measured frequency within [500, 2000] Hz");
  }
  const double x = 0.05 * (InterpolateHl(audiogram, 500.0) +
                           InterpolateHl(audiogram, 1000.0) +
                           InterpolateHl(audiogram, 2000.0));
  Prescription p;
  for (size_t i = 0; i < kPrescriptionFrequenciesHz.size(); ++i) {
    const double hl = InterpolateHl(audiogram, kPrescriptionFrequenciesHz[i]);
    p.gains_db[i] = std::max(0.0, x + 0.31 * hl + kNalrCorrectionDb[i]);
  }
  return p;
}

namespace {

// One frequency-sampling pass: `sampled` gains (dB) at the prescription
// frequencies define the desired curve.
FirFilter DesignPass(const std::array<double, 6>& sampled, int num_taps,
                     int sample_rate_hz) {
  const int nfft = NextPowerOfTwo(8 * num_taps);
  const RealFft fft(nfft);
  Prescription curve{sampled};
  std::vector<std::complex<double>> desired(fft.num_bins());
  for (int k = 0; k < fft.num_bins(); ++k) {
    const double f = static_cast<double>(k) * sample_rate_hz / nfft;
    desired[k] = std::pow(10.0, GainAt(curve, std::max(f, 1.0)) / 20.0);
  }
  std::vector<double> impulse(nfft);
  fft.Inverse(desired, impulse);

  // Zero-phase response is even about index 0; take lags 0..half and mirror
  // them so the taps are symmetric bit for bit.
  const int half = (num_taps - 1) / 2;
  FirFilter filter{std::vector<double>(num_taps), sample_rate_hz};
  for (int lag = 0; lag <= half; ++lag) {
    const double h = lag == 0 ? impulse[0] : 0.5 * (impulse[lag] + impulse[nfft - lag]);
    const double window = 0.5 + 0.5 * std::cos(std::numbers::pi * lag / (half + 1));
    filter.taps[half + lag] = h * window;
    filter.taps[half - lag] = h * window;
  }
  return filter;
}

constexpr int kMaxCorrectionPasses = 40;
constexpr double kCorrectionToleranceDb = 1e-3;

}  // namespace

FirFilter DesignFir(const Prescription& prescription, int num_taps,
                    int sample_rate_hz) {
  if (num_taps % 2 == 0 || num_taps < 63) {
    throw Error(ErrorKind::kInvalidArgument, "FIR length must be odd and >= 63");
  }
  if (sample_rate_hz <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  }
  // The Hann window smooths the response over a few hundred Hz, which pulls
  // the steep 250-500 Hz region off target. The sampled gains are corrected
  // by the measured error at each prescription frequency until the designed
  // response hits the prescription.
  std::array<double, 6> sampled = prescription.gains_db;
  FirFilter filter = DesignPass(sampled, num_taps, sample_rate_hz);
  for (int pass = 0; pass < kMaxCorrectionPasses; ++pass) {
    double worst = 0.0;
    std::array<double, 6> error{};
    for (size_t i = 0; i < sampled.size(); ++i) {
      error[i] = prescription.gains_db[i] - filter.MagnitudeDb(kPrescriptionFrequenciesHz[i]);
      worst = std::max(worst, std::abs(error[i]));
    }
    if (worst < kCorrectionToleranceDb) break;
    for (size_t i = 0; i < sampled.size(); ++i) sampled[i] += error[i];
    filter = DesignPass(sampled, num_taps, sample_rate_hz);
  }
  return filter;
}

std::shared_ptr<const FirFilter> SharedFittingFilter(const Audiogram& audiogram,
                                                     int sample_rate_hz) {
  using Key = std::tuple<std::vector<double>, std::vector<double>, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const FirFilter>> cache;
  Key key{audiogram.frequencies_hz(), audiogram.levels_db_hl(), sample_rate_hz};
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[key];
  if (!slot) {
    slot = std::make_shared<const FirFilter>(
        DesignFir(Prescribe(audiogram), kDefaultFirTaps, sample_rate_hz));
  }
  return slot;
}

std::vector<double> FilterCompensated(std::span<const double> x,
                                      const FirFilter& filter) {
  const auto n = static_cast<int64_t>(x.size());
  const auto taps = static_cast<int64_t>(filter.taps.size());
  const int64_t delay = filter.group_delay();
  std::vector<double> y(x.size());
  // y[i] = full_conv[i + delay] = sum_j h[j] x[i + delay - j]
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) {
    const int64_t t = i + delay;
    const int64_t j_lo = std::max<int64_t>(0, t - (n - 1));
    const int64_t j_hi = std::min<int64_t>(taps - 1, t);
    double acc = 0.0;
    for (int64_t j = j_lo; j <= j_hi; ++j) acc += filter.taps[j] * x[t - j];
    y[i] = acc;
  }
  return y;
}

AudioSignal Compensate(const AudioSignal& mono, const Audiogram& audiogram) {
  if (mono.num_channels() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "compensation expects a mono signal");
  }
  const auto filter = SharedFittingFilter(audiogram, mono.sample_rate_hz());
  return AudioSignal::Mono(FilterCompensated(mono.channel(0), *filter),
                           mono.sample_rate_hz(), mono.ref_spl_db());
}

namespace reference {

std::vector<double> FilterCompensated(std::span<const double> x,
                                      const FirFilter& filter) {
  // Textbook full convolution, then drop the leading group delay.
  const size_t n = x.size();
  const size_t taps = filter.taps.size();
  std::vector<double> full(n + taps - 1, 0.0);
  for (size_t t = 0; t < full.size(); ++t) {
    double acc = 0.0;
    for (size_t j = 0; j < taps; ++j) {
      if (t >= j && t - j < n) acc += filter.taps[j] * x[t - j];
    }
    full[t] = acc;
  }
  const size_t delay = static_cast<size_t>(filter.group_delay());
  return std::vector<double>(full.begin() + delay, full.begin() + delay + n);
}

}  // namespace reference
}  // namespace hapredict
