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

#ifndef HAPREDICT_WAV_H_
#define HAPREDICT_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hapredict/audio.h"

namespace hapredict {

enum class WavEncoding { kPcm16, kFloat32 };

struct WavSpec {
  int channels = 1;
  int sample_rate_hz = kProcessingRateHz;
  WavEncoding encoding = WavEncoding::kPcm16;
};

struct WavWriteResult {
  // Samples with |x| > 1 that were hard-clipped to full scale.
  size_t clip_count = 0;
};

struct EncodedWav {
  std::vector<uint8_t> bytes;
  WavWriteResult result;
};

// RIFF/WAVE with PCM16 or float32 payload, 1 or 2 channels.
AudioSignal DecodeWav(std::span<const uint8_t> bytes,
                      double ref_spl_db = kDefaultRefSplDb,
                      WavSpec* spec = nullptr);
AudioSignal ReadWav(const std::filesystem::path& path,
                    double ref_spl_db = kDefaultRefSplDb,
                    WavSpec* spec = nullptr);

// PCM16 quantization is round(x * 32768) clamped to [-32768, 32767].
EncodedWav EncodeWav(const AudioSignal& signal, WavEncoding encoding);
WavWriteResult WriteWav(const AudioSignal& signal,
                        const std::filesystem::path& path,
                        WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace hapredict

#endif  // HAPREDICT_WAV_H_
