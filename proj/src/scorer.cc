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

#include "hapredict/scorer.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hapredict/error.h"
#include "hapredict/hash.h"
#include "http_util.h"

namespace hapredict {

namespace fs = std::filesystem;
using nlohmann::json;

PromptTemplate PromptTemplate::Default() {
  PromptTemplate p;
  p.system_text =
      "You are an expert evaluator of written English. You judge how natural a "
      "piece of text reads.";
  p.user_template =
      "Rate the naturalness of the following transcript on a scale from 0 to 100. "
      "Naturalness measures how similar the text is to human-generated text in "
      "terms of fluency, coherence, and context. 0 means not at all human-like and "
      "100 means indistinguishable from text written by a person.\n\n"
      "Transcript: \"{transcript}\"";
  p.response_format =
      "Reply strictly as a JSON object of the form {\"score\": <integer>} and "
      "nothing else.";
  return p;
}

void PromptTemplate::Validate() const {
  const size_t first = user_template.find(kTranscriptPlaceholder);
  if (first == std::string::npos) {
    throw Error(ErrorKind::kConfig, "prompt template lacks the {transcript} placeholder");
  }
  if (user_template.find(kTranscriptPlaceholder, first + 1) != std::string::npos) {
    throw Error(ErrorKind::kConfig, "prompt template repeats the {transcript} placeholder");
  }
}

PromptTemplate PromptTemplate::Load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read prompt file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  PromptTemplate p = Default();
  if (path.extension() == ".json") {
    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(ErrorKind::kConfig, "prompt file is not a JSON object: " + path.string());
    }
    auto field = [&](const char* name, std::string& out) {
      if (!doc.contains(name)) return;
      if (!doc[name].is_string()) {
        throw Error(ErrorKind::kConfig, std::string("prompt field ") + name + " must be a string");
      }
      out = doc[name].get<std::string>();
    };
    field("system", p.system_text);
    field("user", p.user_template);
    field("response_format", p.response_format);
  } else {
    p.user_template = text;
  }
  p.Validate();
  return p;
}

std::string PromptTemplate::Canonical() const {
  return json{{"system", system_text},
              {"user", user_template},
              {"response_format", response_format}}
      .dump();
}

std::string BuildPrompt(const PromptTemplate& prompt, std::string_view transcript) {
  prompt.Validate();
  const size_t at = prompt.user_template.find(kTranscriptPlaceholder);
  std::string out = prompt.user_template.substr(0, at);
  out.append(transcript);
  out.append(prompt.user_template.substr(at + kTranscriptPlaceholder.size()));
  if (!prompt.response_format.empty()) out += "\n\n" + prompt.response_format;
  return out;
}

namespace {

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

double Clamp(double v) {
  // Also folds -0 into 0 so reports never print "-0.0".
  return std::clamp(v, 0.0, 100.0) + 0.0;
}

// Start of a real number at i: digits, or '.' followed by a digit.
bool NumberStartsAt(std::string_view s, size_t i) {
  if (IsDigit(s[i])) return true;
  return s[i] == '.' && i + 1 < s.size() && IsDigit(s[i + 1]);
}

}  // namespace

double ParseScore(std::string_view reply) {
  const json doc = json::parse(reply.begin(), reply.end(), nullptr, false);
  if (!doc.is_discarded() && doc.is_object()) {
    const auto it = doc.find("score");
    if (it != doc.end() && it->is_number()) return Clamp(it->get<double>());
  }
  for (size_t i = 0; i < reply.size(); ++i) {
    if (!NumberStartsAt(reply, i)) continue;
    size_t begin = i;
    if (i > 0 && (reply[i - 1] == '-' || reply[i - 1] == '+')) begin = i - 1;
    size_t end = i;
    while (end < reply.size() && IsDigit(reply[end])) ++end;
    if (end < reply.size() && reply[end] == '.') {
      ++end;
      while (end < reply.size() && IsDigit(reply[end])) ++end;
    }
    if (end < reply.size() && (reply[end] == 'e' || reply[end] == 'E')) {
      size_t exp = end + 1;
      if (exp < reply.size() && (reply[exp] == '+' || reply[exp] == '-')) ++exp;
      if (exp < reply.size() && IsDigit(reply[exp])) {
        end = exp;
        while (end < reply.size() && IsDigit(reply[end])) ++end;
      }
    }
    // strtod saturates to +-HUGE_VAL or 0, which the clamp absorbs.
    const std::string token(reply.substr(begin, end - begin));
    return Clamp(std::strtod(token.c_str(), nullptr));
  }
  throw Error(ErrorKind::kUnparsableReply, "no number in reply");
}

void ScorerConfig::Validate() const {
  if (backend != "http" && backend != "stub") {
    throw Error(ErrorKind::kConfig, "scorer backend must be http or stub, got '" + backend + "'");
  }
  if (backend == "http") internal::SplitHttpUrl(base_url);
  if (model.empty()) throw Error(ErrorKind::kConfig, "scorer model is empty");
  if (!(timeout_s > 0.0)) throw Error(ErrorKind::kConfig, "scorer timeout_s must be > 0");
  if (max_retries < 0) throw Error(ErrorKind::kConfig, "scorer max_retries must be >= 0");
  if (max_concurrency < 1) throw Error(ErrorKind::kConfig, "scorer max_concurrency must be >= 1");
}

namespace {

class HttpChatBackend : public ChatBackend {
 public:
  explicit HttpChatBackend(const ScorerConfig& config)
      : url_(internal::SplitHttpUrl(config.base_url)), timeout_s_(config.timeout_s) {
    while (url_.path.size() > 1 && url_.path.back() == '/') url_.path.pop_back();
    if (url_.path == "/") url_.path.clear();
    if (const char* key = std::getenv(config.api_key_env.c_str())) token_ = key;
  }

  std::string Complete(const ChatRequest& request) override {
    json messages = json::array();
    for (const auto& m : request.messages) {
      messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    const json body = {{"model", request.model},
                       {"temperature", request.temperature},
                       {"messages", messages},
                       {"response_format", {{"type", "json_object"}}}};
    httplib::Client client(url_.origin);
    const auto secs = static_cast<time_t>(timeout_s_);
    const auto usecs = static_cast<time_t>((timeout_s_ - secs) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    auto result = client.Post(url_.path + "/chat/completions", headers, body.dump(),
                              "application/json");
    if (!result) {
      throw TransportFailure("transport error: " + httplib::to_string(result.error()));
    }
    // Rate limiting and server errors are worth another attempt.
    if (result->status == 429 || result->status >= 500) {
      throw TransportFailure("HTTP status " + std::to_string(result->status));
    }
    if (result->status < 200 || result->status >= 300) {
      throw Error(ErrorKind::kScorerUnavailable, "HTTP status " +
                                                     std::to_string(result->status) + ": " +
                                                     result->body.substr(0, 200));
    }
    const json reply = json::parse(result->body, nullptr, false);
    const json* content = nullptr;
    if (!reply.is_discarded() && reply.is_object() && reply.contains("choices") &&
        reply["choices"].is_array() && !reply["choices"].empty()) {
      const json& choice = reply["choices"][0];
      if (choice.is_object() && choice.contains("message") &&
          choice["message"].is_object() && choice["message"].contains("content")) {
        content = &choice["message"]["content"];
      }
    }
    if (content == nullptr || !content->is_string()) {
      throw Error(ErrorKind::kScorerUnavailable, "malformed chat completion reply");
    }
    return content->get<std::string>();
  }

 private:
  internal::SplitUrl url_;
  double timeout_s_;
  std::string token_;
};

class LengthStubBackend : public ChatBackend {
 public:
  explicit LengthStubBackend(PromptTemplate prompt) {
    prompt.Validate();
    const std::string marker = "\x01";
    const std::string built = BuildPrompt(prompt, marker);
    const size_t at = built.find(marker);
    prefix_ = built.substr(0, at);
    suffix_ = built.substr(at + marker.size());
  }

  std::string Complete(const ChatRequest& request) override {
    for (const auto& m : request.messages) {
      if (m.role != "user") continue;
      const std::string& c = m.content;
      if (c.size() < prefix_.size() + suffix_.size() || !c.starts_with(prefix_) ||
          !c.ends_with(suffix_)) {
        break;
      }
      const std::string_view text(c.data() + prefix_.size(),
                                  c.size() - prefix_.size() - suffix_.size());
      size_t length = 0;
      for (unsigned char ch : text) length += (ch & 0xC0) != 0x80 ? 1 : 0;
      const size_t score = std::min<size_t>(100, 10 * length);
      return "{\"score\": " + std::to_string(score) + "}";
    }
    return "I could not find the transcript.";
  }

 private:
  std::string prefix_;
  std::string suffix_;
};

}  // namespace

std::unique_ptr<ChatBackend> MakeHttpChatBackend(const ScorerConfig& config) {
  return std::make_unique<HttpChatBackend>(config);
}

std::unique_ptr<ChatBackend> MakeLengthStubBackend(PromptTemplate prompt) {
  return std::make_unique<LengthStubBackend>(std::move(prompt));
}

std::unique_ptr<ChatBackend> MakeChatBackend(const ScorerConfig& config,
                                             const PromptTemplate& prompt) {
  config.Validate();
  if (config.backend == "stub") return MakeLengthStubBackend(prompt);
  return MakeHttpChatBackend(config);
}

Scorer::Scorer(ScorerConfig config, PromptTemplate prompt,
               std::unique_ptr<ChatBackend> backend, RetryPolicy retry, JsonCache* cache)
    : config_(std::move(config)),
      prompt_(std::move(prompt)),
      backend_(std::move(backend)),
      retry_(std::move(retry)),
      cache_(cache != nullptr ? cache : &own_cache_),
      gate_(config_.max_concurrency, config_.rate_per_s) {
  config_.Validate();
  prompt_.Validate();
}

std::string Scorer::CacheKey(std::string_view transcript) const {
  return Sha256Fields({"score", config_.model, prompt_.Canonical(), transcript});
}

std::string Scorer::Complete(const ChatRequest& request) {
  try {
    return WithRetries(retry_, config_.max_retries, [&] {
      BackendGate::Permit permit(gate_);
      ++backend_calls_;
      return backend_->Complete(request);
    });
  } catch (const TransportFailure& e) {
    throw Error(ErrorKind::kScorerUnavailable,
                "scorer unavailable after " + std::to_string(config_.max_retries + 1) +
                    " attempts: " + e.what());
  }
}

JudgeScore Scorer::Score(std::string_view transcript, std::string_view judge_id) {
  auto compute = [&]() -> json {
    ChatRequest request;
    request.model = config_.model;
    request.temperature = 0.0;
    if (!prompt_.system_text.empty()) request.messages.push_back({"system", prompt_.system_text});
    request.messages.push_back({"user", BuildPrompt(prompt_, transcript)});
    std::string reply = Complete(request);
    try {
      return {{"score", ParseScore(reply)}, {"raw_reply", reply}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kUnparsableReply) throw;
    }
    // One re-ask with the unreadable answer in context.
    request.messages.push_back({"assistant", reply});
    request.messages.push_back(
        {"user", "Your previous reply did not contain a score. " + prompt_.response_format});
    reply = Complete(request);
    try {
      return {{"score", ParseScore(reply)}, {"raw_reply", reply}};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kUnparsableReply) throw;
      throw Error(ErrorKind::kScoringFailed,
                  "reply unparsable after re-ask: " + reply.substr(0, 120));
    }
  };
  const auto lookup = cache_->GetOrCompute(CacheKey(transcript), compute);
  JudgeScore score;
  score.value = lookup.value.at("score").get<double>();
  score.raw_reply = lookup.value.at("raw_reply").get<std::string>();
  score.judge_id = std::string(judge_id);
  score.cached = lookup.cached;
  return score;
}

}  // namespace hapredict
