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

#ifndef HAPREDICT_SCORER_H_
#define HAPREDICT_SCORER_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hapredict/cache.h"
#include "hapredict/rate_limit.h"
#include "hapredict/retry.h"

namespace hapredict {

inline constexpr std::string_view kTranscriptPlaceholder = "{transcript}";

struct PromptTemplate {
  std::string system_text;
  // Must contain kTranscriptPlaceholder exactly once.
  std::string user_template;
  std::string response_format;

  static PromptTemplate Default();
  // Plain text replaces the user template and keeps the default system and
  // response-format text. A .json file may set "system", "user" and
  // "response_format". Throws Error(kConfig).
  static PromptTemplate Load(const std::filesystem::path& path);

  void Validate() const;  // throws Error(kConfig)
  // Stable text form, used for cache keys.
  std::string Canonical() const;
};

// User message: the template with the transcript inserted verbatim in a
// single pass, followed by the response-format instruction.
std::string BuildPrompt(const PromptTemplate& prompt, std::string_view transcript);

// Strict JSON {"score": x} first, else the first real number in the text.
// Clamped to [0, 100]. Throws Error(kUnparsableReply) when there is no
// number. Total over arbitrary bytes.
double ParseScore(std::string_view reply);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

// One completion attempt. Throw TransportFailure for retryable problems.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string Complete(const ChatRequest& request) = 0;
};

struct ScorerConfig {
  std::string backend = "http";  // "http" or "stub"
  std::string base_url;          // e.g. https://api.openai.com/v1
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 60.0;
  int max_retries = 2;
  int max_concurrency = 2;
  double rate_per_s = 0.0;

  void Validate() const;  // throws Error(kConfig)
};

// Chat-completions client: POST <base_url>/chat/completions.
std::unique_ptr<ChatBackend> MakeHttpChatBackend(const ScorerConfig& config);

// Deterministic offline scorer: recovers the transcript from the prompt and
// replies {"score": min(100, 10 * length)} with length in code points.
std::unique_ptr<ChatBackend> MakeLengthStubBackend(PromptTemplate prompt);

std::unique_ptr<ChatBackend> MakeChatBackend(const ScorerConfig& config,
                                             const PromptTemplate& prompt);

struct JudgeScore {
  double value = 0.0;
  std::string judge_id;
  std::string raw_reply;
  bool cached = false;
};

class Scorer {
 public:
  Scorer(ScorerConfig config, PromptTemplate prompt, std::unique_ptr<ChatBackend> backend,
         RetryPolicy retry = DefaultRetryPolicy(), JsonCache* cache = nullptr);

  // Throws Error(kScorerUnavailable) after transport retries and
  // Error(kScoringFailed) when the re-asked reply is still unparsable.
  JudgeScore Score(std::string_view transcript, std::string_view judge_id);

  // Depends on model, template and transcript only.
  std::string CacheKey(std::string_view transcript) const;

  int64_t backend_calls() const { return backend_calls_.load(); }
  const ScorerConfig& config() const { return config_; }
  const PromptTemplate& prompt() const { return prompt_; }

 private:
  std::string Complete(const ChatRequest& request);

  ScorerConfig config_;
  PromptTemplate prompt_;
  std::unique_ptr<ChatBackend> backend_;
  RetryPolicy retry_;
  JsonCache own_cache_;
  JsonCache* cache_;
  BackendGate gate_;
  std::atomic<int64_t> backend_calls_{0};
};

}  // namespace hapredict

#endif  // HAPREDICT_SCORER_H_
