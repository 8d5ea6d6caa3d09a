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

#include "hapredict/recruitment.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hapredict/error.h"
#include "hapredict/smearing.h"

namespace hapredict {

double ErbRate(double frequency_hz) {
  return 21.4 * std::log10(4.37 * frequency_hz / 1000.0 + 1.0);
}

double ErbRateToHz(double erb_rate) {
  return (std::pow(10.0, erb_rate / 21.4) - 1.0) * 1000.0 / 4.37;
}

GammatoneBank::GammatoneBank(const RecruitmentParams& params, int sample_rate_hz)
    : sample_rate_hz_(sample_rate_hz) {
  if (params.n_channels < 8) {
    throw Error(ErrorKind::kInvalidArgument, "need at least 8 gammatone channels");
  }
  if (!(params.f_lo_hz > 0.0) || !(params.f_lo_hz < params.f_hi_hz) ||
      params.f_hi_hz > 0.45 * sample_rate_hz) {
    throw Error(ErrorKind::kInvalidArgument,
                "gammatone range must satisfy 0 < f_lo < f_hi <= 0.45 rate");
  }
  const double lo = ErbRate(params.f_lo_hz);
  const double hi = ErbRate(params.f_hi_hz);
  for (int k = 0; k < params.n_channels; ++k) {
    const double fc = ErbRateToHz(lo + (hi - lo) * k / (params.n_channels - 1));
    centers_hz_.push_back(fc);
    pole_.push_back(std::exp(-2.0 * std::numbers::pi * 1.019 * ErbHz(fc) /
                             sample_rate_hz));
  }

  constexpr int kGridPoints = 256;
  double sum = 0.0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double f = ErbRateToHz(lo + (hi - lo) * (i + 0.5) / kGridPoints);
    double response = 0.0;
    for (int k = 0; k < num_channels(); ++k) response += Response(k, f);
    sum += response;
  }
  synthesis_gain_ = kGridPoints / sum;
}

double GammatoneBank::Response(int k, double frequency_hz) const {
  const double a = pole_[k];
  const double theta =
      2.0 * std::numbers::pi * (frequency_hz - centers_hz_[k]) / sample_rate_hz_;
  const double one_pole_power =
      (1.0 - a) * (1.0 - a) / (1.0 - 2.0 * a * std::cos(theta) + a * a);
  return one_pole_power * one_pole_power;
}

void GammatoneBank::Analyze(std::span<const double> x, int k,
                            std::span<std::complex<double>> out) const {
  const size_t n = x.size();
  const double a = pole_[k];
  const double b = 1.0 - a;
  const double omega = 2.0 * std::numbers::pi * centers_hz_[k] / sample_rate_hz_;
  for (size_t i = 0; i < n; ++i) {
    out[i] = x[i] * std::polar(1.0, -omega * static_cast<double>(i));
  }
  for (int pass = 0; pass < 2; ++pass) {
    std::complex<double> state = 0.0;
    for (size_t i = 0; i < n; ++i) out[i] = state = b * out[i] + a * state;
  }
  for (int pass = 0; pass < 2; ++pass) {
    std::complex<double> state = 0.0;
    for (size_t i = n; i-- > 0;) out[i] = state = b * out[i] + a * state;
  }
  for (size_t i = 0; i < n; ++i) {
    out[i] *= 2.0 * std::polar(1.0, omega * static_cast<double>(i));
  }
}

std::vector<double> ExpansionRatios(const Audiogram& audiogram,
                                    const GammatoneBank& bank,
                                    const RecruitmentParams& params) {
  std::vector<double> ratios;
  for (double fc : bank.centers_hz()) {
    const double hl = std::min(InterpolateHl(audiogram, fc), params.max_hl_db);
    ratios.push_back(params.catch_level_db_spl / (params.catch_level_db_spl - hl));
  }
  return ratios;
}

double EnvelopeAtLevel(double level_db_spl, double ref_spl_db) {
  return std::sqrt(2.0) * std::pow(10.0, (level_db_spl - ref_spl_db) / 20.0);
}

namespace {

struct Prepared {
  GammatoneBank bank;
  std::vector<double> ratios;
  double env_catch;
  int clamped;
};

Prepared Prepare(const AudioSignal& mono, const Audiogram& audiogram,
                 const RecruitmentParams& params) {
  if (mono.num_channels() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "recruitment expects a mono signal");
  }
  if (!(params.max_hl_db < params.catch_level_db_spl)) {
    throw Error(ErrorKind::kInvalidArgument, "HL ceiling must be below catch level");
  }
  GammatoneBank bank(params, mono.sample_rate_hz());
  int clamped = 0;
  for (double fc : bank.centers_hz()) {
    if (InterpolateHl(audiogram, fc) > params.max_hl_db) ++clamped;
  }
  if (clamped > 0) {
    spdlog::warn("recruitment: hearing loss clamped to {} dB HL in {} channel(s)",
                 params.max_hl_db, clamped);
  }
  auto ratios = ExpansionRatios(audiogram, bank, params);
  return {std::move(bank), std::move(ratios),
          EnvelopeAtLevel(params.catch_level_db_spl, mono.ref_spl_db()), clamped};
}

// Forward-backward one-pole low-pass; impulse response is nonnegative.
void SmoothEnvelope(std::vector<double>& env, double cutoff_hz, int rate) {
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff_hz / rate);
  double state = env.empty() ? 0.0 : env.front();
  for (double& v : env) v = state = (1.0 - a) * v + a * state;
  state = env.empty() ? 0.0 : env.back();
  for (size_t i = env.size(); i-- > 0;) env[i] = state = (1.0 - a) * env[i] + a * state;
}

// Expanded band signal of channel k, written to `out`.
void ProcessChannel(const Prepared& prep, const RecruitmentParams& params,
                    std::span<const double> x, int k, std::span<double> out,
                    RecruitmentChannel* detail) {
  const size_t n = x.size();
  std::vector<std::complex<double>> analytic(n);
  prep.bank.Analyze(x, k, analytic);
  std::vector<double> env(n);
  for (size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
  if (detail != nullptr) detail->input_envelope = env;
  SmoothEnvelope(env, params.envelope_cutoff_hz, prep.bank.sample_rate_hz());

  const double exponent = prep.ratios[k] - 1.0;
  if (detail != nullptr) {
    detail->center_hz = prep.bank.centers_hz()[k];
    detail->expansion_ratio = prep.ratios[k];
    detail->input.resize(n);
    detail->gain.resize(n);
  }
  for (size_t i = 0; i < n; ++i) {
    const double level = std::max(0.0, env[i]) / prep.env_catch;
    const double gain = std::min(1.0, std::pow(level, exponent));
    out[i] = gain * analytic[i].real();
    if (detail != nullptr) {
      detail->input[i] = analytic[i].real();
      detail->gain[i] = gain;
    }
  }
}

}  // namespace

AudioSignal ApplyRecruitment(const AudioSignal& mono, const Audiogram& audiogram,
                             const RecruitmentParams& params,
                             RecruitmentDetail* detail) {
  const Prepared prep = Prepare(mono, audiogram, params);
  const size_t n = mono.num_frames();
  const int channels = prep.bank.num_channels();
  const auto x = mono.channel(0);
  if (detail != nullptr) {
    detail->channels.assign(channels, RecruitmentChannel{});
    detail->clamped_channels = prep.clamped;
  }

  std::vector<double> bands(static_cast<size_t>(channels) * n);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < channels; ++k) {
    ProcessChannel(prep, params, x, k, std::span<double>(&bands[k * n], n),
                   detail != nullptr ? &detail->channels[k] : nullptr);
  }

  std::vector<double> out(n, 0.0);
  for (int k = 0; k < channels; ++k) {
    const double* band = &bands[k * n];
    for (size_t i = 0; i < n; ++i) out[i] += band[i];
  }
  for (double& v : out) v *= prep.bank.synthesis_gain();
  return AudioSignal::Mono(std::move(out), mono.sample_rate_hz(), mono.ref_spl_db());
}

namespace reference {

AudioSignal ApplyRecruitment(const AudioSignal& mono, const Audiogram& audiogram,
                             const RecruitmentParams& params) {
  const Prepared prep = Prepare(mono, audiogram, params);
  const size_t n = mono.num_frames();
  std::vector<double> band(n);
  std::vector<double> out(n, 0.0);
  for (int k = 0; k < prep.bank.num_channels(); ++k) {
    ProcessChannel(prep, params, mono.channel(0), k, band, nullptr);
    for (size_t i = 0; i < n; ++i) out[i] += band[i];
  }
  for (double& v : out) v *= prep.bank.synthesis_gain();
  return AudioSignal::Mono(std::move(out), mono.sample_rate_hz(), mono.ref_spl_db());
}

}  // namespace reference
}  // namespace hapredict
