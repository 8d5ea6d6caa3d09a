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

#include "hapredict/audio.h"

#include <algorithm>
#include <cmath>

#include "hapredict/error.h"

namespace hapredict {

AudioSignal::AudioSignal(std::vector<std::vector<double>> channels,
                         int sample_rate_hz, double ref_spl_db)
    : channels_(std::move(channels)),
      sample_rate_hz_(sample_rate_hz),
      ref_spl_db_(ref_spl_db) {
  if (sample_rate_hz_ <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  }
  if (!std::isfinite(ref_spl_db_)) {
    throw Error(ErrorKind::kInvalidArgument, "reference SPL must be finite");
  }
  for (const auto& ch : channels_) {
    if (ch.size() != channels_.front().size()) {
      throw Error(ErrorKind::kInvalidArgument, "channels differ in length");
    }
  }
}

AudioSignal AudioSignal::Mono(std::vector<double> samples, int sample_rate_hz,
                              double ref_spl_db) {
  std::vector<std::vector<double>> channels;
  channels.push_back(std::move(samples));
  return AudioSignal(std::move(channels), sample_rate_hz, ref_spl_db);
}

AudioSignal AudioSignal::ChannelAsMono(int index) const {
  return Mono(channels_.at(index), sample_rate_hz_, ref_spl_db_);
}

double Rms(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double x : samples) sum += x * x;
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

namespace {

double LevelFromMeanSquare(double mean_square, double ref_spl_db) {
  if (mean_square <= 0.0) return kSilenceLevelDb;
  return std::max(kSilenceLevelDb, ref_spl_db + 10.0 * std::log10(mean_square));
}

}  // namespace

double LevelDbSpl(const AudioSignal& signal) {
  if (signal.num_frames() == 0) {
    throw Error(ErrorKind::kEmptySignal, "level of an empty signal");
  }
  double sum = 0.0;
  for (const auto& ch : signal.channels()) {
    for (double x : ch) sum += x * x;
  }
  const double count =
      static_cast<double>(signal.num_frames()) * signal.num_channels();
  return LevelFromMeanSquare(sum / count, signal.ref_spl_db());
}

std::vector<double> ChannelLevelsDbSpl(const AudioSignal& signal) {
  if (signal.num_frames() == 0) {
    throw Error(ErrorKind::kEmptySignal, "level of an empty signal");
  }
  std::vector<double> levels;
  for (const auto& ch : signal.channels()) {
    const double rms = Rms(ch);
    levels.push_back(LevelFromMeanSquare(rms * rms, signal.ref_spl_db()));
  }
  return levels;
}

}  // namespace hapredict
