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

#include "hapredict/cache.h"

#include <atomic>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>
#include <unistd.h>

#include "hapredict/error.h"

namespace hapredict {

namespace fs = std::filesystem;

JsonCache::JsonCache(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create cache dir " + dir_->string());
  }
}

std::optional<nlohmann::json> JsonCache::ReadFile(const std::string& key) const {
  if (!dir_) return std::nullopt;
  std::ifstream in(*dir_ / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto value = nlohmann::json::parse(buffer.str(), nullptr, false);
  if (value.is_discarded()) {
    spdlog::warn("ignoring corrupt cache entry {}", key);
    return std::nullopt;
  }
  return value;
}

void JsonCache::WriteFile(const std::string& key, const nlohmann::json& value) const {
  if (!dir_) return;
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = *dir_ / (key + ".tmp" + std::to_string(::getpid()) + "." +
                                std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary);
    out << value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    if (!out) throw Error(ErrorKind::kIo, "cannot write cache entry " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, *dir_ / (key + ".json"), ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::kIo, "cannot commit cache entry " + key);
  }
}

std::optional<nlohmann::json> JsonCache::Find(const std::string& key) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  auto value = ReadFile(key);
  if (value) {
    std::lock_guard lock(mu_);
    memory_.emplace(key, *value);
  }
  return value;
}

JsonCache::Lookup JsonCache::GetOrCompute(
    const std::string& key, const std::function<nlohmann::json()>& compute) {
  if (auto hit = Find(key)) return {std::move(*hit), true};

  std::promise<nlohmann::json> promise;
  std::shared_future<nlohmann::json> pending;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    if (auto it = memory_.find(key); it != memory_.end()) return {it->second, true};
    if (auto it = in_flight_.find(key); it != in_flight_.end()) {
      pending = it->second;
    } else {
      pending = promise.get_future().share();
      in_flight_.emplace(key, pending);
      owner = true;
    }
  }
  // Someone else is already computing this key; their result is a hit.
  if (!owner) return {pending.get(), true};

  try {
    nlohmann::json value = compute();
    WriteFile(key, value);
    {
      std::lock_guard lock(mu_);
      memory_.emplace(key, value);
      in_flight_.erase(key);
    }
    promise.set_value(value);
    return {std::move(value), false};
  } catch (...) {
    {
      std::lock_guard lock(mu_);
      in_flight_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

}  // namespace hapredict
