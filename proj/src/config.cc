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

#include "hapredict/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hapredict/error.h"
#include "hapredict/hash.h"
#include "toml.hpp"

namespace hapredict {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

inline constexpr std::string_view kFingerprintVersion = "hapredict-report-1";

json TomlToJson(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = TomlToJson(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(TomlToJson(value));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw Error(ErrorKind::kConfig, "config line " + std::to_string(node.source().begin.line) +
                                      ": dates and times are not supported");
}

// Typed accessors over one table that reject unknown keys.
class Table {
 public:
  Table(const json& doc, std::string name) : doc_(doc), name_(std::move(name)) {
    if (!doc_.is_object()) throw Error(ErrorKind::kConfig, name_ + " must be a table");
  }

  // Call once every known key has been read.
  void RejectUnknown() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!used_.contains(key)) {
        throw Error(ErrorKind::kConfig, "unknown key '" + key + "' in " + name_);
      }
    }
  }

  const json* Find(const std::string& key) {
    used_.insert(key);
    const auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  void String(const std::string& key, std::string& out) {
    if (const json* v = Find(key)) {
      if (!v->is_string()) Bad(key, "a string");
      out = v->get<std::string>();
    }
  }
  void Number(const std::string& key, double& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number()) Bad(key, "a number");
      out = v->get<double>();
    }
  }
  void Integer(const std::string& key, int& out) {
    if (const json* v = Find(key)) {
      if (!v->is_number_integer()) Bad(key, "an integer");
      out = v->get<int>();
    }
  }
  void Bool(const std::string& key, bool& out) {
    if (const json* v = Find(key)) {
      if (!v->is_boolean()) Bad(key, "true or false");
      out = v->get<bool>();
    }
  }
  void Strings(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = Find(key)) {
      if (!v->is_array()) Bad(key, "an array of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) Bad(key, "an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  [[noreturn]] void Bad(const std::string& key, const std::string& what) const {
    throw Error(ErrorKind::kConfig, name_ + "." + key + " must be " + what);
  }

 private:
  const json& doc_;
  std::string name_;
  std::set<std::string> used_;
};

std::string ResolvePath(const std::string& value, const fs::path& base_dir) {
  const fs::path p(value);
  if (p.is_absolute() || base_dir.empty()) return value;
  return (base_dir / p).lexically_normal().string();
}

JudgeConfig JudgeFromJson(const json& doc, const std::string& judge_id,
                          const fs::path& base_dir) {
  Table t(doc, "judges." + judge_id);
  JudgeConfig c;
  c.judge_id = judge_id;
  std::string backend = "fixture";
  t.String("backend", backend);
  c.backend = ParseBackendKind(backend);
  t.String("endpoint", c.endpoint);
  t.String("model", c.model);
  t.Strings("args", c.args);
  t.String("api_key_env", c.api_key_env);
  t.Number("timeout_s", c.timeout_s);
  t.Integer("max_retries", c.max_retries);
  t.Integer("max_concurrency", c.max_concurrency);
  t.Number("rate_per_s", c.rate_per_s);
  t.RejectUnknown();
  // Bare command names are looked up on PATH.
  const bool path_like = c.backend == BackendKind::kFixture ||
                         (c.backend == BackendKind::kCommand &&
                          c.endpoint.find('/') != std::string::npos);
  if (path_like && !c.endpoint.empty()) c.endpoint = ResolvePath(c.endpoint, base_dir);
  return c;
}

std::string EndpointIdentity(const JudgeConfig& c) {
  if (c.backend == BackendKind::kHttp) return c.endpoint;
  return fs::path(c.endpoint).lexically_normal().filename().string();
}

}  // namespace

json ParseToml(std::string_view text) {
  try {
    return TomlToJson(toml::parse(text));
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::kConfig, "config line " + std::to_string(e.source().begin.line) +
                                        ": " + std::string(e.description()));
  }
}

void PipelineConfig::Validate() const {
  small.Validate();
  large.Validate();
  if (small.judge_id != "small" || large.judge_id != "large") {
    throw Error(ErrorKind::kConfig, "judges must be small and large");
  }
  scorer.Validate();
  prompt.Validate();
  if (!std::isfinite(ref_spl_db)) throw Error(ErrorKind::kConfig, "ref_spl_db must be finite");
  for (double w : judge_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kConfig, "judge weights must be finite and >= 0");
    }
  }
  if (judge_weights[0] + judge_weights[1] <= 0.0) {
    throw Error(ErrorKind::kConfig, "judge weights must not both be zero");
  }
}

std::string PipelineConfig::Fingerprint() const {
  auto judge = [](const JudgeConfig& c) {
    return json{{"backend", BackendKindName(c.backend)},
                {"endpoint", EndpointIdentity(c)},
                {"model", c.model},
                {"args", c.args}};
  };
  const json doc = {
      {"version", kFingerprintVersion},
      {"judges", {{"small", judge(small)}, {"large", judge(large)}}},
      {"scorer", {{"backend", scorer.backend}, {"model", scorer.model}}},
      {"prompt", prompt.Canonical()},
      {"ref_spl_db", ref_spl_db},
      {"better_ear", better_ear},
      {"compensate", compensate},
      {"judge_weights", judge_weights},
  };
  return Sha256Hex(doc.dump());
}

PipelineConfig ConfigFromJson(const json& doc, const fs::path& base_dir) {
  PipelineConfig c;
  Table root(doc, "config");
  root.Number("ref_spl_db", c.ref_spl_db);
  root.Bool("better_ear", c.better_ear);
  root.Bool("compensate", c.compensate);
  if (const json* w = root.Find("judge_weights")) {
    if (!w->is_array() || w->size() != 2 || !(*w)[0].is_number() || !(*w)[1].is_number()) {
      root.Bad("judge_weights", "two numbers");
    }
    c.judge_weights = {(*w)[0].get<double>(), (*w)[1].get<double>()};
  }
  const json* judges = root.Find("judges");
  if (judges == nullptr) throw Error(ErrorKind::kConfig, "config has no [judges] table");
  {
    Table jt(*judges, "judges");
    const json* small = jt.Find("small");
    const json* large = jt.Find("large");
    if (small == nullptr || large == nullptr) {
      throw Error(ErrorKind::kConfig, "config needs judges.small and judges.large");
    }
    c.small = JudgeFromJson(*small, "small", base_dir);
    c.large = JudgeFromJson(*large, "large", base_dir);
    jt.RejectUnknown();
  }
  if (const json* scorer = root.Find("scorer")) {
    Table st(*scorer, "scorer");
    st.String("backend", c.scorer.backend);
    st.String("base_url", c.scorer.base_url);
    st.String("model", c.scorer.model);
    st.String("api_key_env", c.scorer.api_key_env);
    st.Number("timeout_s", c.scorer.timeout_s);
    st.Integer("max_retries", c.scorer.max_retries);
    st.Integer("max_concurrency", c.scorer.max_concurrency);
    st.Number("rate_per_s", c.scorer.rate_per_s);
    std::string prompt_file;
    st.String("prompt_file", prompt_file);
    st.RejectUnknown();
    if (!prompt_file.empty()) c.prompt = PromptTemplate::Load(ResolvePath(prompt_file, base_dir));
  }
  root.RejectUnknown();
  c.Validate();
  return c;
}

PipelineConfig LoadConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  if (path.extension() == ".json") {
    doc = json::parse(buffer.str(), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::kConfig, "config is not valid JSON");
  } else {
    doc = ParseToml(buffer.str());
  }
  return ConfigFromJson(doc, path.parent_path());
}

}  // namespace hapredict
