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

#ifndef HAPREDICT_JUDGES_H_
#define HAPREDICT_JUDGES_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hapredict/audio.h"
#include "hapredict/cache.h"
#include "hapredict/error.h"
#include "hapredict/rate_limit.h"
#include "hapredict/retry.h"

namespace hapredict {

inline constexpr int kJudgeRateHz = 16000;

enum class BackendKind { kHttp, kCommand, kFixture };

std::string_view BackendKindName(BackendKind kind);
BackendKind ParseBackendKind(std::string_view name);  // throws kConfig

struct JudgeConfig {
  std::string judge_id;  // "small" or "large"
  BackendKind backend = BackendKind::kFixture;
  // URL for http, executable for command, transcript directory for fixture.
  std::string endpoint;
  std::string model;
  // Extra arguments placed before the WAV path for command backends.
  std::vector<std::string> args;
  // Environment variable holding a bearer token for http backends.
  std::string api_key_env;
  double timeout_s = 60.0;
  int max_retries = 2;
  int max_concurrency = 4;
  double rate_per_s = 0.0;

  // Throws Error(kConfig).
  void Validate() const;
};

// The audio exactly as sent to a judge: 16 kHz mono PCM16 WAV.
struct JudgePayload {
  std::vector<uint8_t> wav;
  std::string sha256;
};

// Mixes to mono, resamples to 16 kHz and encodes.
JudgePayload MakeJudgePayload(const AudioSignal& signal);

struct Transcript {
  std::string text;  // verbatim backend output
  std::string judge_id;
  double latency_ms = 0.0;
  BackendKind backend = BackendKind::kFixture;
  std::string payload_sha256;
  bool cached = false;
};

// One transcription attempt. Throw TransportFailure for retryable problems
// and Error(kBackend) when the backend answered with a failure.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual std::string Transcribe(const JudgePayload& payload,
                                 std::string_view utterance_id) = 0;
};

std::unique_ptr<JudgeBackend> MakeJudgeBackend(const JudgeConfig& config);

class Judge {
 public:
  Judge(JudgeConfig config, std::unique_ptr<JudgeBackend> backend,
        RetryPolicy retry = DefaultRetryPolicy(), JsonCache* cache = nullptr);

  // Throws Error(kJudgeUnavailable) once retries are spent and passes
  // Error(kBackend) through.
  Transcript Transcribe(const JudgePayload& payload, std::string_view utterance_id);

  const JudgeConfig& config() const { return config_; }
  // Attempts that reached the backend, including failed ones.
  int64_t backend_calls() const { return backend_calls_.load(); }

 private:
  std::string CacheKey(const JudgePayload& payload, std::string_view utterance_id) const;

  JudgeConfig config_;
  std::unique_ptr<JudgeBackend> backend_;
  RetryPolicy retry_;
  JsonCache* cache_;
  BackendGate gate_;
  std::atomic<int64_t> backend_calls_{0};
};

struct JudgeFailure {
  std::string judge_id;
  ErrorKind kind = ErrorKind::kBackend;
  std::string message;
};

struct JudgePair {
  std::optional<Transcript> small;
  std::optional<Transcript> large;
  std::vector<JudgeFailure> failures;  // small first

  bool ok() const { return failures.empty(); }
};

// Runs both judges concurrently on the same payload.
JudgePair RunJudges(Judge& small, Judge& large, const JudgePayload& payload,
                    std::string_view utterance_id);

}  // namespace hapredict

#endif  // HAPREDICT_JUDGES_H_
