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

#ifndef HAPREDICT_SMEARING_H_
#define HAPREDICT_SMEARING_H_

#include <memory>
#include <span>
#include <vector>

#include "hapredict/audio.h"
#include "hapredict/audiogram.h"

namespace hapredict {

inline constexpr int kSmearFftSize = 512;
inline constexpr int kSmearHop = 128;

// Auditory filter broadening factors on the lower and upper skirts.
struct SmearParams {
  double broaden_lower = 1.0;
  double broaden_upper = 1.0;
};

SmearParams SmearParamsFor(Severity severity);

double ErbHz(double frequency_hz);

// Nonnegative matrix mapping an input power spectrum over bins 0..nfft/2 to
// a smeared power spectrum. Row r holds the weights of output bin r.
class SmearMatrix {
 public:
  SmearMatrix(int nfft, int sample_rate_hz, std::vector<double> entries);

  static SmearMatrix Identity(int nfft, int sample_rate_hz);

  int nfft() const { return nfft_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  int num_bins() const { return nfft_ / 2 + 1; }
  double at(int row, int col) const { return entries_[row * num_bins() + col]; }
  std::span<const double> row(int r) const {
    return std::span<const double>(entries_).subspan(r * num_bins(), num_bins());
  }
  const std::vector<double>& entries() const { return entries_; }

  // out = M * power.
  void Apply(std::span<const double> power, std::span<double> out) const;

 private:
  int nfft_;
  int sample_rate_hz_;
  std::vector<double> entries_;
};

// Roex(p) auditory filters, one row per bin centre, p = 4 f / ERB(f) with the
// lower and upper p divided by the given broadening. Row-major, bins
// 0..nfft/2 on both axes.
std::vector<double> RoexFilterMatrix(double broaden_lower, double broaden_upper,
                                     int nfft, int sample_rate_hz);

// pinv(normal filters) * broadened filters, negatives clipped to zero
// and each column rescaled to keep its unclipped total.
// nfft must be a power of two >= 128. Throws kNumericalConditioning when the
// normal-filter matrix is numerically singular.
SmearMatrix BuildSmearMatrix(const SmearParams& params, int nfft,
                             int sample_rate_hz);

// Built once per (severity, rate) and shared read-only.
std::shared_ptr<const SmearMatrix> SharedSmearMatrix(Severity severity,
                                                     int sample_rate_hz);

// Hann 512 / hop 128 STFT; each frame's power spectrum is smeared, phase is
// kept, and frames are recombined by weighted overlap-add. Output length
// equals input length. Frames run in parallel.
AudioSignal ApplySmearing(const AudioSignal& mono, const SmearMatrix& matrix);

namespace reference {
// Single-threaded frame loop; same arithmetic as the parallel kernel.
AudioSignal ApplySmearing(const AudioSignal& mono, const SmearMatrix& matrix);
}  // namespace reference

}  // namespace hapredict

#endif  // HAPREDICT_SMEARING_H_
