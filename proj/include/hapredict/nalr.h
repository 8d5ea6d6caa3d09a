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

#ifndef HAPREDICT_NALR_H_
#define HAPREDICT_NALR_H_

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "hapredict/audio.h"
#include "hapredict/audiogram.h"

namespace hapredict {

inline constexpr std::array<double, 6> kPrescriptionFrequenciesHz = {
    250, 500, 1000, 2000, 4000, 6000};
inline constexpr int kDefaultFirTaps = 221;

// NAL-R insertion gains (dB, >= 0) at kPrescriptionFrequenciesHz.
struct Prescription {
  std::array<double, 6> gains_db{};
};

// Linear-phase FIR; taps are exactly symmetric.
struct FirFilter {
  std::vector<double> taps;
  int sample_rate_hz = kProcessingRateHz;

  int group_delay() const { return static_cast<int>(taps.size() - 1) / 2; }
  // |H(f)| in dB.
  double MagnitudeDb(double frequency_hz) const;
};

// X = 0.05 (HL500 + HL1000 + HL2000); G(f) = max(0, X + 0.31 HL(f) + k(f)).
// Throws kInsufficientAudiogram when no measured frequency lies in
// [500, 2000] Hz.
Prescription Prescribe(const Audiogram& audiogram);

// Frequency-sampling design: gains interpolated in dB on a log-frequency
// axis (held below 250 Hz and above 6 kHz), zero-phase inverse FFT, centred
// and Hann-windowed to `num_taps` (odd, >= 63).
FirFilter DesignFir(const Prescription& prescription, int num_taps = kDefaultFirTaps,
                    int sample_rate_hz = kProcessingRateHz);

// Memoized per audiogram; shared read-only.
std::shared_ptr<const FirFilter> SharedFittingFilter(const Audiogram& audiogram,
                                                     int sample_rate_hz);

// Full convolution with the group delay removed; output length equals input.
std::vector<double> FilterCompensated(std::span<const double> x,
                                      const FirFilter& filter);

// NAL-R compensation of a calibrated mono signal.
AudioSignal Compensate(const AudioSignal& mono, const Audiogram& audiogram);

namespace reference {
std::vector<double> FilterCompensated(std::span<const double> x,
                                      const FirFilter& filter);
}  // namespace reference

}  // namespace hapredict

#endif  // HAPREDICT_NALR_H_
