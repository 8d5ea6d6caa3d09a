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

#ifndef HAPREDICT_CACHE_H_
#define HAPREDICT_CACHE_H_

#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace hapredict {

// Content-addressed JSON cache. Entries live in memory and, when a directory
// is given, in `<dir>/<key>.json` (written to a temp file, then renamed).
// Concurrent lookups of a missing key share one computation.
class JsonCache {
 public:
  explicit JsonCache(std::optional<std::filesystem::path> dir = std::nullopt);

  struct Lookup {
    nlohmann::json value;
    bool cached = false;
  };

  // If `compute` throws nothing is stored and every waiter on the key
  // receives the exception.
  Lookup GetOrCompute(const std::string& key,
                      const std::function<nlohmann::json()>& compute);

  std::optional<nlohmann::json> Find(const std::string& key);

 private:
  std::optional<nlohmann::json> ReadFile(const std::string& key) const;
  void WriteFile(const std::string& key, const nlohmann::json& value) const;

  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::map<std::string, nlohmann::json> memory_;
  std::map<std::string, std::shared_future<nlohmann::json>> in_flight_;
};

}  // namespace hapredict

#endif  // HAPREDICT_CACHE_H_
