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

#include "hapredict/msbg.h"

#include <array>
#include <cstdio>

#include "hapredict/error.h"
#include "hapredict/nalr.h"
#include "hapredict/smearing.h"

namespace hapredict {

void StageTrace::Add(std::string stage, std::string detail, double in_rms,
                     double out_rms) {
  records_.push_back({std::move(stage), std::move(detail), in_rms, out_rms, true});
}

void StageTrace::Add(std::string stage, std::string detail) {
  records_.push_back({std::move(stage), std::move(detail), 0.0, 0.0, false});
}

std::vector<std::string> StageTrace::StageNames() const {
  std::vector<std::string> names;
  for (const auto& r : records_) names.push_back(r.stage);
  return names;
}

std::vector<std::string> StageTrace::Lines() const {
  std::vector<std::string> lines;
  for (const auto& r : records_) {
    std::string line = "stage=" + r.stage;
    if (!r.detail.empty()) line += " " + r.detail;
    if (r.has_levels) {
      char rms[96];
      std::snprintf(rms, sizeof(rms), " in_rms=%.6g out_rms=%.6g", r.in_rms, r.out_rms);
      line += rms;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

AudioSignal SimulateEar(const AudioSignal& mono, const Audiogram& audiogram,
                        StageTrace* trace, const std::string& ear) {
  if (mono.num_channels() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "SimulateEar expects a mono signal");
  }
  if (mono.sample_rate_hz() != kProcessingRateHz) {
    throw Error(ErrorKind::kInvalidArgument,
                "SimulateEar expects the 44.1 kHz processing rate");
  }
  const std::string detail = ear.empty() ? std::string() : "ear=" + ear;
  const Severity severity = ClassifySeverity(audiogram);
  if (severity == Severity::kNone) {
    if (trace != nullptr) {
      const double rms = Rms(mono.channel(0));
      trace->Add("msbg.bypass", detail, rms, rms);
    }
    return mono;
  }
  const auto matrix = SharedSmearMatrix(severity, mono.sample_rate_hz());
  AudioSignal smeared = ApplySmearing(mono, *matrix);
  if (trace != nullptr) {
    trace->Add("msbg.smear", detail, Rms(mono.channel(0)), Rms(smeared.channel(0)));
  }
  AudioSignal recruited = ApplyRecruitment(smeared, audiogram);
  if (trace != nullptr) {
    trace->Add("msbg.recruit", detail, Rms(smeared.channel(0)),
               Rms(recruited.channel(0)));
  }
  return recruited;
}

AudioSignal ProcessListener(const AudioSignal& signal, const ListenerProfile& listener,
                            const ListenerChainOptions& options, StageTrace* trace) {
  if (signal.num_channels() < 1 || signal.num_channels() > 2) {
    throw Error(ErrorKind::kFormat, "listener simulation takes 1 or 2 channels");
  }
  const std::array<const Audiogram*, 2> audiograms = {&listener.left, &listener.right};
  const std::array<const char*, 2> names = {"left", "right"};
  std::array<AudioSignal, 2> ears;
  for (int e = 0; e < 2; ++e) {
    const int channel = signal.num_channels() == 2 ? e : 0;
    ears[e] = SimulateEar(signal.ChannelAsMono(channel), *audiograms[e], trace,
                          names[e]);
  }
  if (options.compensate) {
    for (int e = 0; e < 2; ++e) {
      AudioSignal fitted = Compensate(ears[e], *audiograms[e]);
      if (trace != nullptr) {
        trace->Add("nalr", std::string("ear=") + names[e], Rms(ears[e].channel(0)),
                   Rms(fitted.channel(0)));
      }
      ears[e] = std::move(fitted);
    }
  }
  if (options.downmix == DownmixMode::kBetterEar) {
    const bool right_better =
        FourFrequencyAverage(listener.right) < FourFrequencyAverage(listener.left);
    return ears[right_better ? 1 : 0];
  }
  std::vector<double> mixed(ears[0].num_frames());
  const auto left = ears[0].channel(0);
  const auto right = ears[1].channel(0);
  for (size_t i = 0; i < mixed.size(); ++i) mixed[i] = 0.5 * (left[i] + right[i]);
  return AudioSignal::Mono(std::move(mixed), ears[0].sample_rate_hz(),
                           ears[0].ref_spl_db());
}

AudioSignal SimulateListener(const AudioSignal& signal, const ListenerProfile& listener,
                             DownmixMode downmix, StageTrace* trace) {
  return ProcessListener(signal, listener, {downmix, false}, trace);
}

}  // namespace hapredict
