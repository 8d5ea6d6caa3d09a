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

#ifndef HAPREDICT_RESAMPLE_H_
#define HAPREDICT_RESAMPLE_H_

#include "hapredict/audio.h"

namespace hapredict {

// Windowed-sinc (Kaiser) polyphase resampling by the rational factor
// target/source. Output length is round(n * target / source); the passband
// extends to 0.45 * min(source, target) with < 0.1 dB ripple. Samples beyond
// either end of the input are taken as zero.
AudioSignal Resample(const AudioSignal& signal, int target_rate_hz);

}  // namespace hapredict

#endif  // HAPREDICT_RESAMPLE_H_
