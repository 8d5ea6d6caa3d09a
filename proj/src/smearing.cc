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

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "hapredict/error.h"
#include "hapredict/fft.h"

namespace hapredict {

SmearParams SmearParamsFor(Severity severity) {
  switch (severity) {
    case Severity::kNone: return {1.0, 1.0};
    case Severity::kMild: return {1.6, 1.1};
    case Severity::kModerate: return {2.4, 1.6};
    case Severity::kSevere: return {4.0, 2.0};
  }
  return {1.0, 1.0};
}

double ErbHz(double frequency_hz) {
  return 24.7 * (4.37 * frequency_hz / 1000.0 + 1.0);
}

SmearMatrix::SmearMatrix(int nfft, int sample_rate_hz, std::vector<double> entries)
    : nfft_(nfft), sample_rate_hz_(sample_rate_hz), entries_(std::move(entries)) {
  if (entries_.size() != static_cast<size_t>(num_bins()) * num_bins()) {
    throw Error(ErrorKind::kInvalidArgument, "smear matrix has wrong size");
  }
}

SmearMatrix SmearMatrix::Identity(int nfft, int sample_rate_hz) {
  const int n = nfft / 2 + 1;
  std::vector<double> entries(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) entries[i * n + i] = 1.0;
  return SmearMatrix(nfft, sample_rate_hz, std::move(entries));
}

void SmearMatrix::Apply(std::span<const double> power, std::span<double> out) const {
  const int n = num_bins();
  for (int r = 0; r < n; ++r) {
    const double* w = &entries_[r * n];
    double acc = 0.0;
    for (int c = 0; c < n; ++c) acc += w[c] * power[c];
    out[r] = acc;
  }
}

std::vector<double> RoexFilterMatrix(double broaden_lower, double broaden_upper,
                                     int nfft, int sample_rate_hz) {
  const int n = nfft / 2 + 1;
  const double mean_broadening = (broaden_lower + broaden_upper) / 2.0;
  std::vector<double> filters(static_cast<size_t>(n) * n, 0.0);
  // The DC row has no bandwidth; it passes DC scaled like the other rows.
  filters[0] = 1.0 / mean_broadening;
  for (int i = 1; i < n; ++i) {
    const double center_hz = static_cast<double>(i) * sample_rate_hz / nfft;
    const double erb = ErbHz(center_hz);
    const double p_lower = 4.0 * center_hz / (erb * broaden_lower);
    const double p_upper = 4.0 * center_hz / (erb * broaden_upper);
    // Unit equivalent bandwidth in bins, widened with the broadening.
    const double norm = erb * mean_broadening / 24.7;
    for (int j = 0; j < n; ++j) {
      const double g = std::abs(static_cast<double>(i - j) / i);
      const double p = j < i ? p_lower : p_upper;
      filters[i * n + j] = (1.0 + p * g) * std::exp(-p * g) / norm;
    }
  }
  return filters;
}

SmearMatrix BuildSmearMatrix(const SmearParams& params, int nfft,
                             int sample_rate_hz) {
  if (nfft < 128 || (nfft & (nfft - 1)) != 0) {
    throw Error(ErrorKind::kInvalidArgument, "nfft must be a power of two >= 128");
  }
  if (sample_rate_hz <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  }
  if (!(params.broaden_lower >= 1.0) || !(params.broaden_upper >= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "broadening factors must be >= 1");
  }
  const int n = nfft / 2 + 1;
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto normal_entries = RoexFilterMatrix(1.0, 1.0, nfft, sample_rate_hz);
  const auto wide_entries = RoexFilterMatrix(params.broaden_lower,
                                             params.broaden_upper, nfft,
                                             sample_rate_hz);
  const Eigen::Map<const RowMatrix> normal(normal_entries.data(), n, n);
  const Eigen::Map<const RowMatrix> wide(wide_entries.data(), n, n);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(normal, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-12 * sv(0))) {
    throw Error(ErrorKind::kNumericalConditioning,
                "normal auditory filter matrix is numerically singular");
  }
  RowMatrix smear = svd.solve(Eigen::MatrixXd(wide));
  if (!smear.allFinite()) {
    throw Error(ErrorKind::kNumericalConditioning, "non-finite smear weight");
  }
  // Clipping the negative lobes would add power; each column (the spread of
  // one input bin) is rescaled to its unclipped total.
  for (int c = 0; c < n; ++c) {
    const double total = smear.col(c).sum();
    smear.col(c) = smear.col(c).cwiseMax(0.0);
    const double clipped_total = smear.col(c).sum();
    if (clipped_total > 0.0 && total > 0.0) smear.col(c) *= total / clipped_total;
  }
  std::vector<double> entries(smear.data(), smear.data() + smear.size());
  return SmearMatrix(nfft, sample_rate_hz, std::move(entries));
}

std::shared_ptr<const SmearMatrix> SharedSmearMatrix(Severity severity,
                                                     int sample_rate_hz) {
  static std::mutex mutex;
  static std::map<std::pair<Severity, int>, std::shared_ptr<const SmearMatrix>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{severity, sample_rate_hz}];
  if (!slot) {
    slot = std::make_shared<const SmearMatrix>(
        BuildSmearMatrix(SmearParamsFor(severity), kSmearFftSize, sample_rate_hz));
  }
  return slot;
}

namespace {

std::vector<double> PeriodicHann(int size) {
  std::vector<double> w(size);
  for (int i = 0; i < size; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / size);
  }
  return w;
}

// Frame layout over the signal padded by one window on the left and one
// window plus a hop on the right, so every input sample is covered by the
// full set of overlapping frames.
struct FrameLayout {
  size_t input_length;
  size_t padded_length;
  size_t num_frames;
  int window;
  int hop;

  FrameLayout(size_t n, int window_size, int hop_size)
      : input_length(n), window(window_size), hop(hop_size) {
    padded_length = n + 2 * window + hop;
    num_frames = (padded_length - window) / hop + 1;
  }

  std::vector<double> Pad(std::span<const double> x) const {
    std::vector<double> padded(padded_length, 0.0);
    std::copy(x.begin(), x.end(), padded.begin() + window);
    return padded;
  }
};

class FrameSmearer {
 public:
  FrameSmearer(const SmearMatrix& matrix, const std::vector<double>& window)
      : matrix_(matrix),
        window_(window),
        fft_(matrix.nfft()),
        frame_(matrix.nfft()),
        spectrum_(matrix.num_bins()),
        power_(matrix.num_bins()),
        smeared_(matrix.num_bins()) {}

  // Writes the windowed resynthesis of the frame starting at `start` to `out`.
  void Process(const double* start, std::span<double> out) {
    const int n = fft_.size();
    for (int i = 0; i < n; ++i) frame_[i] = start[i] * window_[i];
    fft_.Forward(frame_, spectrum_);
    for (int k = 0; k < matrix_.num_bins(); ++k) power_[k] = std::norm(spectrum_[k]);
    matrix_.Apply(power_, smeared_);
    for (int k = 0; k < matrix_.num_bins(); ++k) {
      const double magnitude = std::sqrt(std::max(0.0, smeared_[k]));
      const double original = std::abs(spectrum_[k]);
      spectrum_[k] = original > 0.0 ? spectrum_[k] * (magnitude / original)
                                    : std::complex<double>(magnitude, 0.0);
    }
    // Bins 0 and nfft/2 of a real signal's spectrum are real.
    spectrum_.front() = spectrum_.front().real();
    spectrum_.back() = spectrum_.back().real();
    fft_.Inverse(spectrum_, out);
    for (int i = 0; i < n; ++i) out[i] *= window_[i];
  }

 private:
  const SmearMatrix& matrix_;
  const std::vector<double>& window_;
  RealFft fft_;
  std::vector<double> frame_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<double> power_;
  std::vector<double> smeared_;
};

void CheckSmearInput(const AudioSignal& mono, const SmearMatrix& matrix) {
  if (mono.num_channels() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "smearing expects a mono signal");
  }
  if (mono.sample_rate_hz() != matrix.sample_rate_hz()) {
    throw Error(ErrorKind::kInvalidArgument,
                "signal rate differs from smear matrix rate");
  }
  if (matrix.nfft() != kSmearFftSize) {
    throw Error(ErrorKind::kInvalidArgument, "smear matrix must use nfft 512");
  }
}

// Divides the overlap-added frames by the summed squared window and trims
// the padding.
AudioSignal Normalize(const AudioSignal& mono, const FrameLayout& layout,
                      std::vector<double>& accum, const std::vector<double>& window) {
  std::vector<double> weight(layout.padded_length, 0.0);
  for (size_t f = 0; f < layout.num_frames; ++f) {
    const size_t start = f * layout.hop;
    for (int i = 0; i < layout.window; ++i) weight[start + i] += window[i] * window[i];
  }
  std::vector<double> out(layout.input_length);
  for (size_t i = 0; i < layout.input_length; ++i) {
    const size_t at = i + layout.window;
    out[i] = accum[at] / weight[at];
  }
  return AudioSignal::Mono(std::move(out), mono.sample_rate_hz(), mono.ref_spl_db());
}

}  // namespace

AudioSignal ApplySmearing(const AudioSignal& mono, const SmearMatrix& matrix) {
  CheckSmearInput(mono, matrix);
  if (mono.num_frames() == 0) return mono;
  const auto window = PeriodicHann(kSmearFftSize);
  const FrameLayout layout(mono.num_frames(), kSmearFftSize, kSmearHop);
  const auto padded = layout.Pad(mono.channel(0));

  std::vector<double> frames(layout.num_frames * layout.window);
  const auto num_frames = static_cast<int64_t>(layout.num_frames);
#pragma omp parallel
  {
    FrameSmearer smearer(matrix, window);
#pragma omp for schedule(static)
    for (int64_t f = 0; f < num_frames; ++f) {
      smearer.Process(&padded[f * layout.hop],
                      std::span<double>(&frames[f * layout.window], layout.window));
    }
  }

  std::vector<double> accum(layout.padded_length, 0.0);
  for (size_t f = 0; f < layout.num_frames; ++f) {
    const double* frame = &frames[f * layout.window];
    double* dst = &accum[f * layout.hop];
    for (int i = 0; i < layout.window; ++i) dst[i] += frame[i];
  }
  return Normalize(mono, layout, accum, window);
}

namespace reference {

AudioSignal ApplySmearing(const AudioSignal& mono, const SmearMatrix& matrix) {
  CheckSmearInput(mono, matrix);
  if (mono.num_frames() == 0) return mono;
  const auto window = PeriodicHann(kSmearFftSize);
  const FrameLayout layout(mono.num_frames(), kSmearFftSize, kSmearHop);
  const auto padded = layout.Pad(mono.channel(0));

  FrameSmearer smearer(matrix, window);
  std::vector<double> frame(layout.window);
  std::vector<double> accum(layout.padded_length, 0.0);
  for (size_t f = 0; f < layout.num_frames; ++f) {
    smearer.Process(&padded[f * layout.hop], frame);
    for (int i = 0; i < layout.window; ++i) accum[f * layout.hop + i] += frame[i];
  }
  return Normalize(mono, layout, accum, window);
}

}  // namespace reference
}  // namespace hapredict
