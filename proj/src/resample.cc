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

#include "hapredict/resample.h"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "hapredict/error.h"

namespace hapredict {
namespace {

constexpr int kZeroCrossings = 32;
constexpr double kKaiserBeta = 9.0;
// Above this many phases the tap table is computed per output sample.
constexpr int64_t kMaxTabulatedPhases = 8192;

class SincKernel {
 public:
  SincKernel(int64_t up, int64_t down)
      : up_(up),
        scale_(std::min(1.0, static_cast<double>(up) / static_cast<double>(down))),
        half_width_(kZeroCrossings / scale_),
        half_taps_(static_cast<int>(std::ceil(half_width_))),
        window_norm_(std::cyl_bessel_i(0.0, kKaiserBeta)) {
    if (up_ <= kMaxTabulatedPhases) {
      table_.resize(static_cast<size_t>(up_) * taps());
      for (int64_t p = 0; p < up_; ++p) Fill(p, &table_[p * taps()]);
    }
  }

  int half_taps() const { return half_taps_; }
  int taps() const { return 2 * half_taps_; }

  // Taps for input offsets i = -half_taps+1 .. half_taps relative to
  // floor(t), where t = floor(t) + phase / up.
  const double* Taps(int64_t phase, std::vector<double>& scratch) const {
    if (!table_.empty()) return &table_[phase * taps()];
    scratch.resize(taps());
    Fill(phase, scratch.data());
    return scratch.data();
  }

 private:
  double Impulse(double x) const {
    const double u = x / half_width_;
    if (std::abs(u) >= 1.0) return 0.0;
    const double arg = std::numbers::pi * scale_ * x;
    const double sinc = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
    const double window =
        std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - u * u)) / window_norm_;
    return scale_ * sinc * window;
  }

  void Fill(int64_t phase, double* out) const {
    const double frac = static_cast<double>(phase) / static_cast<double>(up_);
    double sum = 0.0;
    for (int i = -half_taps_ + 1; i <= half_taps_; ++i) {
      const double h = Impulse(frac - i);
      out[i + half_taps_ - 1] = h;
      sum += h;
    }
    // Unit DC gain per phase.
    for (int k = 0; k < taps(); ++k) out[k] /= sum;
  }

  int64_t up_;
  double scale_;
  double half_width_;
  int half_taps_;
  double window_norm_;
  std::vector<double> table_;
};

}  // namespace

AudioSignal Resample(const AudioSignal& signal, int target_rate_hz) {
  if (target_rate_hz <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "target rate must be positive");
  }
  const int source_rate_hz = signal.sample_rate_hz();
  if (target_rate_hz == source_rate_hz) return signal;

  const int64_t g = std::gcd(source_rate_hz, target_rate_hz);
  const int64_t up = target_rate_hz / g;
  const int64_t down = source_rate_hz / g;
  const int64_t n_in = static_cast<int64_t>(signal.num_frames());
  const int64_t n_out = (2 * n_in * up + down) / (2 * down);

  const SincKernel kernel(up, down);
  std::vector<std::vector<double>> out(signal.num_channels(),
                                       std::vector<double>(n_out));
  for (int c = 0; c < signal.num_channels(); ++c) {
    const auto x = signal.channel(c);
    auto& y = out[c];
#pragma omp parallel
    {
      std::vector<double> scratch;
#pragma omp for schedule(static)
      for (int64_t m = 0; m < n_out; ++m) {
        const int64_t position = m * down;
        const int64_t base = position / up;
        const double* taps = kernel.Taps(position % up, scratch);
        double acc = 0.0;
        for (int i = -kernel.half_taps() + 1; i <= kernel.half_taps(); ++i) {
          const int64_t k = base + i;
          if (k >= 0 && k < n_in) acc += x[k] * taps[i + kernel.half_taps() - 1];
        }
        y[m] = acc;
      }
    }
  }
  return AudioSignal(std::move(out), target_rate_hz, signal.ref_spl_db());
}

}  // namespace hapredict
