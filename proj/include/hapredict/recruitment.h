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

#ifndef HAPREDICT_RECRUITMENT_H_
#define HAPREDICT_RECRUITMENT_H_

#include <complex>
#include <span>
#include <vector>

#include "hapredict/audio.h"
#include "hapredict/audiogram.h"

namespace hapredict {

struct RecruitmentParams {
  int n_channels = 32;
  double f_lo_hz = 100.0;
  double f_hi_hz = 8000.0;
  double catch_level_db_spl = 105.0;
  double envelope_cutoff_hz = 40.0;
  double max_hl_db = 80.0;
};

double ErbRate(double frequency_hz);
double ErbRateToHz(double erb_rate);

// Fourth-order gammatone filterbank, centres equally spaced on the ERB-rate
// scale. Each channel is realized as a complex baseband cascade run forward
// twice and backward twice, which gives the fourth-order gammatone magnitude
// response with zero phase; the result is the channel's analytic signal.
class GammatoneBank {
 public:
  GammatoneBank(const RecruitmentParams& params, int sample_rate_hz);

  int num_channels() const { return static_cast<int>(centers_hz_.size()); }
  const std::vector<double>& centers_hz() const { return centers_hz_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  // Scale applied to the channel sum so the bank's summed response averages
  // unity over [f_lo, f_hi].
  double synthesis_gain() const { return synthesis_gain_; }

  // Analytic signal of channel `k`; real part is the band-passed input.
  void Analyze(std::span<const double> x, int k,
               std::span<std::complex<double>> out) const;

  // Zero-phase magnitude response of channel `k` at `frequency_hz`.
  double Response(int k, double frequency_hz) const;

 private:
  int sample_rate_hz_;
  std::vector<double> centers_hz_;
  std::vector<double> pole_;
  double synthesis_gain_ = 1.0;
};

// r(fc) = catch / (catch - min(HL(fc), max_hl)).
std::vector<double> ExpansionRatios(const Audiogram& audiogram,
                                    const GammatoneBank& bank,
                                    const RecruitmentParams& params);

// Envelope amplitude of a sinusoid at `level_db_spl` under `ref_spl_db`.
double EnvelopeAtLevel(double level_db_spl, double ref_spl_db);

struct RecruitmentChannel {
  double center_hz = 0.0;
  double expansion_ratio = 1.0;
  std::vector<double> input;           // band-passed input
  std::vector<double> input_envelope;  // |analytic signal|
  std::vector<double> gain;            // applied per-sample gain, <= 1
};

struct RecruitmentDetail {
  std::vector<RecruitmentChannel> channels;
  int clamped_channels = 0;
};

// Envelope expansion towards the catch level in each gammatone channel,
// gain = min(1, (env / env_catch)^(r - 1)) with env the 40 Hz low-passed
// channel envelope. Channels run in parallel and are summed in order.
AudioSignal ApplyRecruitment(const AudioSignal& mono, const Audiogram& audiogram,
                             const RecruitmentParams& params = {},
                             RecruitmentDetail* detail = nullptr);

namespace reference {
AudioSignal ApplyRecruitment(const AudioSignal& mono, const Audiogram& audiogram,
                             const RecruitmentParams& params = {});
}  // namespace reference

}  // namespace hapredict

#endif  // HAPREDICT_RECRUITMENT_H_
