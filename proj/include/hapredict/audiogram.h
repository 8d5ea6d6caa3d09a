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

#ifndef HAPREDICT_AUDIOGRAM_H_
#define HAPREDICT_AUDIOGRAM_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hapredict {

// Pure-tone hearing thresholds for one ear. Immutable after construction.
class Audiogram {
 public:
  // Throws Error(kInvalidArgument) unless frequencies are strictly ascending
  // and positive, levels are finite and within [-10, 120] dB HL, and both
  // lists have the same length >= 2.
  Audiogram(std::vector<double> frequencies_hz, std::vector<double> levels_db_hl);

  static Audiogram Flat(double level_db_hl);

  const std::vector<double>& frequencies_hz() const { return frequencies_hz_; }
  const std::vector<double>& levels_db_hl() const { return levels_db_hl_; }

  bool operator==(const Audiogram&) const = default;

 private:
  std::vector<double> frequencies_hz_;
  std::vector<double> levels_db_hl_;
};

struct ListenerProfile {
  std::string listener_id;
  Audiogram left;
  Audiogram right;
};

enum class Severity { kNone, kMild, kModerate, kSevere };

std::string_view SeverityName(Severity severity);

// Hearing loss at `frequency_hz`, linear in log-frequency between measured
// points and held constant outside the measured range.
double InterpolateHl(const Audiogram& audiogram, double frequency_hz);

// Mean loss over measured frequencies in [2000, 8000] Hz:
// < 15 none, [15, 35) mild, [35, 56] moderate, > 56 severe.
Severity ClassifySeverity(const Audiogram& audiogram);

// Average of the losses at 500, 1000, 2000 and 4000 Hz.
double FourFrequencyAverage(const Audiogram& audiogram);

using ListenerMap = std::map<std::string, ListenerProfile, std::less<>>;

// Parses the CPC listener-file shape:
//   { "<id>": { "audiogram_cfs": [...], "audiogram_levels_l": [...],
//               "audiogram_levels_r": [...] }, ... }
ListenerMap ParseListeners(std::string_view json_text);
ListenerMap LoadListeners(const std::filesystem::path& path);

}  // namespace hapredict

#endif  // HAPREDICT_AUDIOGRAM_H_
