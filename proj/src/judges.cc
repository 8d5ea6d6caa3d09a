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

#include "hapredict/judges.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <future>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "hapredict/hash.h"
#include "hapredict/resample.h"
#include "hapredict/wav.h"
#include "http_util.h"

extern char** environ;

namespace hapredict {

namespace fs = std::filesystem;

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttp: return "http";
    case BackendKind::kCommand: return "command";
    case BackendKind::kFixture: return "fixture";
  }
  return "?";
}

BackendKind ParseBackendKind(std::string_view name) {
  if (name == "http") return BackendKind::kHttp;
  if (name == "command") return BackendKind::kCommand;
  if (name == "fixture") return BackendKind::kFixture;
  throw Error(ErrorKind::kConfig, "unknown judge backend: " + std::string(name));
}

void JudgeConfig::Validate() const {
  if (judge_id != "small" && judge_id != "large") {
    throw Error(ErrorKind::kConfig, "judge_id must be small or large, got '" + judge_id + "'");
  }
  if (endpoint.empty()) {
    throw Error(ErrorKind::kConfig, "judge " + judge_id + " has no endpoint");
  }
  if (!(timeout_s > 0.0)) throw Error(ErrorKind::kConfig, "timeout_s must be > 0");
  if (max_retries < 0) throw Error(ErrorKind::kConfig, "max_retries must be >= 0");
  if (max_concurrency < 1) throw Error(ErrorKind::kConfig, "max_concurrency must be >= 1");
  if (backend == BackendKind::kHttp) internal::SplitHttpUrl(endpoint);
}

JudgePayload MakeJudgePayload(const AudioSignal& signal) {
  AudioSignal mono = signal;
  if (signal.num_channels() > 1) {
    std::vector<double> mixed(signal.num_frames(), 0.0);
    for (int c = 0; c < signal.num_channels(); ++c) {
      const auto ch = signal.channel(c);
      for (size_t i = 0; i < mixed.size(); ++i) mixed[i] += ch[i];
    }
    for (double& v : mixed) v /= signal.num_channels();
    mono = AudioSignal::Mono(std::move(mixed), signal.sample_rate_hz(), signal.ref_spl_db());
  }
  const AudioSignal at_rate = Resample(mono, kJudgeRateHz);
  JudgePayload payload;
  payload.wav = EncodeWav(at_rate, WavEncoding::kPcm16).bytes;
  payload.sha256 = Sha256Hex(payload.wav);
  return payload;
}

namespace {

class FixtureBackend : public JudgeBackend {
 public:
  explicit FixtureBackend(fs::path dir) : dir_(std::move(dir)) {}

  std::string Transcribe(const JudgePayload&, std::string_view utterance_id) override {
    const fs::path file = dir_ / (std::string(utterance_id) + ".txt");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorKind::kBackend, "no fixture transcript " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

 private:
  fs::path dir_;
};

class HttpBackend : public JudgeBackend {
 public:
  explicit HttpBackend(const JudgeConfig& config)
      : url_(internal::SplitHttpUrl(config.endpoint)),
        model_(config.model),
        timeout_s_(config.timeout_s) {
    if (!config.api_key_env.empty()) {
      if (const char* key = std::getenv(config.api_key_env.c_str())) token_ = key;
    }
  }

  std::string Transcribe(const JudgePayload& payload, std::string_view) override {
    httplib::Client client(url_.origin);
    const auto secs = static_cast<time_t>(timeout_s_);
    const auto usecs = static_cast<time_t>((timeout_s_ - secs) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    const httplib::MultipartFormDataItems items = {
        {"file", std::string(payload.wav.begin(), payload.wav.end()), "audio.wav",
         "audio/wav"},
        {"model", model_, "", ""},
    };
    auto result = client.Post(url_.path, headers, items);
    if (!result) {
      throw TransportFailure("transport error: " + httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) {
      throw Error(ErrorKind::kBackend, "HTTP status " + std::to_string(result->status) +
                                           ": " + result->body.substr(0, 200));
    }
    auto body = nlohmann::json::parse(result->body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("text") ||
        !body["text"].is_string()) {
      throw Error(ErrorKind::kBackend, "reply has no string field \"text\"");
    }
    return body["text"].get<std::string>();
  }

 private:
  internal::SplitUrl url_;
  std::string model_;
  double timeout_s_;
  std::string token_;
};

// Closes a descriptor on scope exit.
struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

class CommandBackend : public JudgeBackend {
 public:
  explicit CommandBackend(const JudgeConfig& config)
      : exe_(config.endpoint), args_(config.args), timeout_s_(config.timeout_s) {}

  std::string Transcribe(const JudgePayload& payload, std::string_view) override {
    const fs::path wav = WriteTemp(payload);
    struct Cleanup {
      fs::path p;
      ~Cleanup() {
        std::error_code ec;
        fs::remove(p, ec);
      }
    } cleanup{wav};
    return Run(wav.string());
  }

 private:
  static fs::path WriteTemp(const JudgePayload& payload) {
    std::string tmpl = (fs::temp_directory_path() / "hapredict-XXXXXX.wav").string();
    const int fd = ::mkstemps(tmpl.data(), 4);
    if (fd < 0) throw Error(ErrorKind::kIo, "cannot create temp WAV");
    Fd guard{fd};
    size_t done = 0;
    while (done < payload.wav.size()) {
      const ssize_t n = ::write(fd, payload.wav.data() + done, payload.wav.size() - done);
      if (n <= 0) throw Error(ErrorKind::kIo, "cannot write temp WAV");
      done += static_cast<size_t>(n);
    }
    return tmpl;
  }

  std::string Run(const std::string& wav_path) const {
    int out_pipe[2];
    int err_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
      throw TransportFailure("pipe failed");
    }
    Fd out_read{out_pipe[0]}, out_write{out_pipe[1]};
    Fd err_read{err_pipe[0]}, err_write{err_pipe[1]};

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);

    std::vector<std::string> argv_storage = {exe_};
    argv_storage.insert(argv_storage.end(), args_.begin(), args_.end());
    argv_storage.push_back(wav_path);
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());
    argv.push_back(nullptr);

    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, exe_.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
      throw Error(ErrorKind::kBackend, "cannot start " + exe_ + ": " + std::strerror(rc));
    }
    ::close(out_write.fd);
    out_write.fd = -1;
    ::close(err_write.fd);
    err_write.fd = -1;

    std::string out;
    std::string err;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(timeout_s_);
    std::array<pollfd, 2> fds = {pollfd{out_read.fd, POLLIN, 0},
                                 pollfd{err_read.fd, POLLIN, 0}};
    int open_fds = 2;
    bool timed_out = false;
    while (open_fds > 0) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        timed_out = true;
        break;
      }
      if (::poll(fds.data(), fds.size(), static_cast<int>(left.count())) < 0) {
        if (errno == EINTR) continue;
        break;
      }
      for (size_t i = 0; i < fds.size(); ++i) {
        if (fds[i].fd < 0 || fds[i].revents == 0) continue;
        char buf[4096];
        const ssize_t n = ::read(fds[i].fd, buf, sizeof(buf));
        if (n > 0) {
          (i == 0 ? out : err).append(buf, static_cast<size_t>(n));
        } else {
          fds[i].fd = -1;
          --open_fds;
        }
      }
    }
    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (timed_out) throw TransportFailure(exe_ + " timed out");
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      throw Error(ErrorKind::kBackend, exe_ + " exited with " + std::to_string(code) +
                                           ": " + err.substr(0, 200));
    }
    return out;
  }

  std::string exe_;
  std::vector<std::string> args_;
  double timeout_s_;
};

}  // namespace

std::unique_ptr<JudgeBackend> MakeJudgeBackend(const JudgeConfig& config) {
  config.Validate();
  switch (config.backend) {
    case BackendKind::kFixture: return std::make_unique<FixtureBackend>(config.endpoint);
    case BackendKind::kHttp: return std::make_unique<HttpBackend>(config);
    case BackendKind::kCommand: return std::make_unique<CommandBackend>(config);
  }
  throw Error(ErrorKind::kConfig, "unknown judge backend");
}

Judge::Judge(JudgeConfig config, std::unique_ptr<JudgeBackend> backend, RetryPolicy retry,
             JsonCache* cache)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      retry_(std::move(retry)),
      cache_(cache),
      gate_(config_.max_concurrency, config_.rate_per_s) {
  config_.Validate();
}

std::string Judge::CacheKey(const JudgePayload& payload,
                            std::string_view utterance_id) const {
  // The fixture backend answers by utterance id, the others by audio; both
  // are part of the key so either kind stays correct.
  return Sha256Fields({"transcript", BackendKindName(config_.backend), config_.endpoint,
                       config_.model, utterance_id, payload.sha256});
}

Transcript Judge::Transcribe(const JudgePayload& payload, std::string_view utterance_id) {
  const auto start = std::chrono::steady_clock::now();
  auto call = [&]() -> nlohmann::json {
    try {
      std::string text = WithRetries(retry_, config_.max_retries, [&] {
        BackendGate::Permit permit(gate_);
        ++backend_calls_;
        return backend_->Transcribe(payload, utterance_id);
      });
      return {{"text", std::move(text)}};
    } catch (const TransportFailure& e) {
      throw Error(ErrorKind::kJudgeUnavailable,
                  "judge " + config_.judge_id + " unavailable after " +
                      std::to_string(config_.max_retries + 1) + " attempts: " + e.what());
    }
  };
  Transcript t;
  if (cache_ != nullptr) {
    auto lookup = cache_->GetOrCompute(CacheKey(payload, utterance_id), call);
    t.text = lookup.value.at("text").get<std::string>();
    t.cached = lookup.cached;
  } else {
    t.text = call().at("text").get<std::string>();
  }
  t.judge_id = config_.judge_id;
  t.backend = config_.backend;
  t.payload_sha256 = payload.sha256;
  t.latency_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return t;
}

JudgePair RunJudges(Judge& small, Judge& large, const JudgePayload& payload,
                    std::string_view utterance_id) {
  auto run = [&](Judge& judge) { return judge.Transcribe(payload, utterance_id); };
  auto large_future = std::async(std::launch::async, run, std::ref(large));
  JudgePair pair;
  auto record = [&](Judge& judge, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      pair.failures.push_back({judge.config().judge_id, e.kind(), e.what()});
    } catch (const std::exception& e) {
      pair.failures.push_back({judge.config().judge_id, ErrorKind::kBackend, e.what()});
    }
  };
  record(small, [&] { pair.small = run(small); });
  record(large, [&] { pair.large = large_future.get(); });
  for (const auto& f : pair.failures) {
    spdlog::warn("utterance {}: judge {} failed: {}", utterance_id, f.judge_id, f.message);
  }
  return pair;
}

}  // namespace hapredict
