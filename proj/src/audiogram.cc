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

#include "hapredict/audiogram.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hapredict/error.h"
#include "nlohmann/json.hpp"

namespace hapredict {

Audiogram::Audiogram(std::vector<double> frequencies_hz,
                     std::vector<double> levels_db_hl)
    : frequencies_hz_(std::move(frequencies_hz)),
      levels_db_hl_(std::move(levels_db_hl)) {
  if (frequencies_hz_.size() != levels_db_hl_.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "audiogram frequency and level lists differ in length");
  }
  if (frequencies_hz_.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "audiogram needs at least two measured frequencies");
  }
  for (size_t i = 0; i < frequencies_hz_.size(); ++i) {
    const double f = frequencies_hz_[i];
    if (!std::isfinite(f) || f <= 0.0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "audiogram frequencies must be positive and finite");
    }
    if (i > 0 && f <= frequencies_hz_[i - 1]) {
      throw Error(ErrorKind::kInvalidArgument,
                  "audiogram frequencies must be strictly ascending");
    }
    const double level = levels_db_hl_[i];
    if (!std::isfinite(level) || level < -10.0 || level > 120.0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "audiogram level outside [-10, 120] dB HL");
    }
  }
}

Audiogram Audiogram::Flat(double level_db_hl) {
  std::vector<double> freqs = {250, 500, 1000, 2000, 3000, 4000, 6000, 8000};
  return Audiogram(freqs, std::vector<double>(freqs.size(), level_db_hl));
}

std::string_view SeverityName(Severity severity) {
  switch (severity) {
    case Severity::kNone: return "none";
    case Severity::kMild: return "mild";
    case Severity::kModerate: return "moderate";
    case Severity::kSevere: return "severe";
  }
  return "unknown";
}

double InterpolateHl(const Audiogram& audiogram, double frequency_hz) {
  if (!std::isfinite(frequency_hz) || frequency_hz <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument,
                "interpolation frequency must be positive and finite");
  }
  const auto& f = audiogram.frequencies_hz();
  const auto& hl = audiogram.levels_db_hl();
  if (frequency_hz <= f.front()) return hl.front();
  if (frequency_hz >= f.back()) return hl.back();
  const auto upper = std::upper_bound(f.begin(), f.end(), frequency_hz);
  const size_t hi = static_cast<size_t>(upper - f.begin());
  const size_t lo = hi - 1;
  const double t = std::log2(frequency_hz / f[lo]) / std::log2(f[hi] / f[lo]);
  return hl[lo] + t * (hl[hi] - hl[lo]);
}

Severity ClassifySeverity(const Audiogram& audiogram) {
  double sum = 0.0;
  int count = 0;
  const auto& f = audiogram.frequencies_hz();
  for (size_t i = 0; i < f.size(); ++i) {
    if (f[i] >= 2000.0 && f[i] <= 8000.0) {
      sum += audiogram.levels_db_hl()[i];
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorKind::kInsufficientAudiogram,
                "no measured frequency within [2000, 8000] Hz");
  }
  const double mean = sum / count;
  if (mean < 15.0) return Severity::kNone;
  if (mean < 35.0) return Severity::kMild;
  if (mean <= 56.0) return Severity::kModerate;
  return Severity::kSevere;
}

double FourFrequencyAverage(const Audiogram& audiogram) {
  return (InterpolateHl(audiogram, 500.0) + InterpolateHl(audiogram, 1000.0) +
          InterpolateHl(audiogram, 2000.0) + InterpolateHl(audiogram, 4000.0)) /
         4.0;
}

namespace {

std::vector<double> NumberArray(const nlohmann::json& entry, const char* key,
                                const std::string& id) {
  if (!entry.contains(key) || !entry.at(key).is_array()) {
    throw Error(ErrorKind::kConfig,
                "listener '" + id + "' lacks array field '" + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : entry.at(key)) {
    if (!v.is_number()) {
      throw Error(ErrorKind::kConfig,
                  "listener '" + id + "' field '" + key + "' is not numeric");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ListenerMap ParseListeners(std::string_view json_text) {
  nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorKind::kConfig, "listener file is not a JSON object");
  }
  ListenerMap listeners;
  for (const auto& [id, entry] : doc.items()) {
    if (id.empty()) {
      throw Error(ErrorKind::kConfig, "listener id must be non-empty");
    }
    const auto cfs = NumberArray(entry, "audiogram_cfs", id);
    try {
      listeners.emplace(
          id, ListenerProfile{id,
                              Audiogram(cfs, NumberArray(entry, "audiogram_levels_l", id)),
                              Audiogram(cfs, NumberArray(entry, "audiogram_levels_r", id))});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidArgument) throw;
      throw Error(ErrorKind::kConfig, "listener '" + id + "': " + e.what());
    }
  }
  return listeners;
}

ListenerMap LoadListeners(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open listener file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseListeners(buffer.str());
}

}  // namespace hapredict
