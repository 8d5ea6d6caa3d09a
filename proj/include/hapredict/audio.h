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

#ifndef HAPREDICT_AUDIO_H_
#define HAPREDICT_AUDIO_H_

#include <span>
#include <vector>

namespace hapredict {

inline constexpr int kProcessingRateHz = 44100;
inline constexpr double kDefaultRefSplDb = 100.0;
// Level reported for an all-zero signal.
inline constexpr double kSilenceLevelDb = -200.0;

// Sampled waveform, full scale +-1.0. `ref_spl_db` is the SPL of a signal
// whose RMS is 1.0.
class AudioSignal {
 public:
  AudioSignal() = default;
  // Throws Error(kInvalidArgument) on ragged channels, a non-positive rate or
  // a non-finite calibration.
  AudioSignal(std::vector<std::vector<double>> channels, int sample_rate_hz,
              double ref_spl_db = kDefaultRefSplDb);

  static AudioSignal Mono(std::vector<double> samples, int sample_rate_hz,
                          double ref_spl_db = kDefaultRefSplDb);

  int num_channels() const { return static_cast<int>(channels_.size()); }
  size_t num_frames() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  int sample_rate_hz() const { return sample_rate_hz_; }
  double ref_spl_db() const { return ref_spl_db_; }

  std::span<const double> channel(int index) const { return channels_.at(index); }
  std::span<double> mutable_channel(int index) { return channels_.at(index); }
  const std::vector<std::vector<double>>& channels() const { return channels_; }

  AudioSignal ChannelAsMono(int index) const;

  bool operator==(const AudioSignal&) const = default;

 private:
  std::vector<std::vector<double>> channels_;
  int sample_rate_hz_ = kProcessingRateHz;
  double ref_spl_db_ = kDefaultRefSplDb;
};

double Rms(std::span<const double> samples);

// ref_spl_db + 20 log10(RMS) over all channels pooled; kSilenceLevelDb for
// silence. Throws Error(kEmptySignal) for zero-length input.
double LevelDbSpl(const AudioSignal& signal);
std::vector<double> ChannelLevelsDbSpl(const AudioSignal& signal);

}  // namespace hapredict

#endif  // HAPREDICT_AUDIO_H_
