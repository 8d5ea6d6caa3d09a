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

#ifndef HAPREDICT_MSBG_H_
#define HAPREDICT_MSBG_H_

#include <string>
#include <vector>

#include "hapredict/audio.h"
#include "hapredict/audiogram.h"
#include "hapredict/recruitment.h"

namespace hapredict {

struct StageRecord {
  std::string stage;
  std::string detail;  // e.g. "ear=left"; empty when not applicable
  double in_rms = 0.0;
  double out_rms = 0.0;
  bool has_levels = false;  // false for stages that do not touch audio
};

// Ordered log of the processing stages applied to one utterance.
class StageTrace {
 public:
  void Add(std::string stage, std::string detail, double in_rms, double out_rms);
  void Add(std::string stage, std::string detail = {});

  const std::vector<StageRecord>& records() const { return records_; }
  std::vector<std::string> StageNames() const;
  // One `stage=<name> [detail] [in_rms=<v> out_rms=<v>]` line per record.
  std::vector<std::string> Lines() const;

 private:
  std::vector<StageRecord> records_;
};

// Hearing-loss simulation of one ear at kProcessingRateHz: exact passthrough
// for Severity::kNone, otherwise spectral smearing followed by recruitment.
AudioSignal SimulateEar(const AudioSignal& mono, const Audiogram& audiogram,
                        StageTrace* trace = nullptr, const std::string& ear = {});

enum class DownmixMode { kMean, kBetterEar };

struct ListenerChainOptions {
  DownmixMode downmix = DownmixMode::kMean;
  // Apply NAL-R to each ear after the simulation, before the downmix.
  bool compensate = false;
};

// Left and right channels (a mono input feeds both) are processed with the
// matching audiogram and combined: sample mean, or in better-ear mode the
// ear with the lower four-frequency average (left on ties).
AudioSignal ProcessListener(const AudioSignal& signal, const ListenerProfile& listener,
                            const ListenerChainOptions& options,
                            StageTrace* trace = nullptr);

AudioSignal SimulateListener(const AudioSignal& signal, const ListenerProfile& listener,
                             DownmixMode downmix = DownmixMode::kMean,
                             StageTrace* trace = nullptr);

}  // namespace hapredict

#endif  // HAPREDICT_MSBG_H_
