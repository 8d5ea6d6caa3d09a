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

#ifndef HAPREDICT_CONFIG_H_
#define HAPREDICT_CONFIG_H_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hapredict/audio.h"
#include "hapredict/judges.h"
#include "hapredict/scorer.h"

namespace hapredict {

struct PipelineConfig {
  JudgeConfig small;
  JudgeConfig large;
  ScorerConfig scorer;
  PromptTemplate prompt = PromptTemplate::Default();
  double ref_spl_db = kDefaultRefSplDb;
  bool better_ear = false;
  // Apply NAL-R after the simulation. Off only for ablations.
  bool compensate = true;
  std::array<double, 2> judge_weights = {0.5, 0.5};

  void Validate() const;  // throws Error(kConfig)

  // Hash of every setting that can change a report. Local paths contribute
  // only their final component so the value is portable.
  std::string Fingerprint() const;
};

// TOML document as JSON. Dates and times are rejected.
// Throws Error(kConfig) with the line number.
nlohmann::json ParseToml(std::string_view text);

// Relative paths in the document resolve against `base_dir`.
PipelineConfig ConfigFromJson(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir);

// `.json` files are JSON, anything else the TOML dialect.
PipelineConfig LoadConfig(const std::filesystem::path& path);

}  // namespace hapredict

#endif  // HAPREDICT_CONFIG_H_
