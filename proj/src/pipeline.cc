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

#include "hapredict/pipeline.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hapredict/metrics.h"
#include "hapredict/resample.h"
#include "hapredict/wav.h"

namespace hapredict {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::vector<ManifestRecord> ParseManifest(const json& doc, const fs::path& signals_dir) {
  if (!doc.is_array()) throw Error(ErrorKind::kConfig, "manifest must be a JSON array");
  std::vector<ManifestRecord> records;
  std::set<std::string> seen;
  for (size_t i = 0; i < doc.size(); ++i) {
    const json& e = doc[i];
    const std::string where = "manifest entry " + std::to_string(i);
    if (!e.is_object()) throw Error(ErrorKind::kConfig, where + " is not an object");
    auto text = [&](const char* key, bool required) -> std::string {
      if (!e.contains(key)) {
        if (required) throw Error(ErrorKind::kConfig, where + " lacks \"" + key + "\"");
        return {};
      }
      if (!e[key].is_string()) {
        throw Error(ErrorKind::kConfig, where + ": \"" + key + "\" must be a string");
      }
      return e[key].get<std::string>();
    };
    ManifestRecord r;
    r.utterance_id = text("signal", true);
    r.listener_id = text("listener", true);
    r.system_id = text("system", false);
    if (r.utterance_id.empty()) throw Error(ErrorKind::kConfig, where + " has an empty signal id");
    if (!seen.insert(r.utterance_id).second) {
      throw Error(ErrorKind::kConfig, "duplicate utterance id " + r.utterance_id);
    }
    const std::string path = text("signal_path", false);
    r.signal_path = path.empty() ? signals_dir / (r.utterance_id + ".wav")
                                 : (fs::path(path).is_absolute() ? fs::path(path)
                                                                 : signals_dir / path);
    if (e.contains("correctness") && !e["correctness"].is_null()) {
      if (!e["correctness"].is_number()) {
        throw Error(ErrorKind::kConfig, where + ": correctness must be a number");
      }
      const double c = e["correctness"].get<double>();
      if (!(c >= 0.0 && c <= 100.0)) {
        throw Error(ErrorKind::kConfig, where + ": correctness outside [0, 100]");
      }
      r.correctness = c;
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ManifestRecord> LoadManifest(const fs::path& path,
                                         const std::optional<fs::path>& signals_dir) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read manifest " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const json doc = json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::kConfig, "manifest is not valid JSON");
  return ParseManifest(doc, signals_dir.value_or(path.parent_path()));
}

void CheckInputs(const std::vector<ManifestRecord>& manifest, const ListenerMap& listeners) {
  std::vector<std::string> problems;
  for (const auto& r : manifest) {
    if (!listeners.contains(r.listener_id)) {
      problems.push_back(r.utterance_id + ": unknown listener " + r.listener_id);
    }
    std::error_code ec;
    if (!fs::is_regular_file(r.signal_path, ec)) {
      problems.push_back(r.utterance_id + ": missing signal " + r.signal_path.string());
    }
  }
  if (problems.empty()) return;
  std::string message = std::to_string(problems.size()) + " unresolved manifest entries";
  for (size_t i = 0; i < problems.size() && i < 10; ++i) message += "\n  " + problems[i];
  throw Error(ErrorKind::kConfig, message);
}

MetricSummary SummarizeMetrics(std::span<const double> pred, std::span<const double> truth) {
  MetricSummary m;
  m.n_labeled = pred.size();
  if (pred.empty()) {
    m.notes.push_back("no scored utterance has a correctness label");
    return m;
  }
  m.rmse = Rmse(pred, truth);
  if (pred.size() < 2) {
    m.notes.push_back("correlations need at least two labeled utterances");
    return m;
  }
  auto guarded = [&](const char* name, auto fn) -> std::optional<double> {
    try {
      return fn(pred, truth);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kUndefinedCorrelation) throw;
      m.notes.push_back(std::string(name) + " undefined: " + e.what());
      return std::nullopt;
    }
  };
  m.lcc = guarded("lcc", [](auto p, auto t) { return Lcc(p, t); });
  m.srcc = guarded("srcc", [](auto p, auto t) { return Srcc(p, t); });
  return m;
}

Backends MakeBackends(const PipelineConfig& config, const std::optional<fs::path>& cache_dir,
                      const RetryPolicy& retry) {
  Backends b;
  b.transcript_cache = std::make_unique<JsonCache>(
      cache_dir ? std::optional<fs::path>(*cache_dir / "transcripts") : std::nullopt);
  b.score_cache = std::make_unique<JsonCache>(
      cache_dir ? std::optional<fs::path>(*cache_dir / "scores") : std::nullopt);
  b.small = std::make_unique<Judge>(config.small, MakeJudgeBackend(config.small), retry,
                                    b.transcript_cache.get());
  b.large = std::make_unique<Judge>(config.large, MakeJudgeBackend(config.large), retry,
                                    b.transcript_cache.get());
  b.scorer = std::make_unique<Scorer>(config.scorer, config.prompt,
                                      MakeChatBackend(config.scorer, config.prompt), retry,
                                      b.score_cache.get());
  return b;
}

namespace {

StageFailure FailureFrom(const std::string& stage, const std::string& judge_id,
                         const std::exception& e) {
  const auto* typed = dynamic_cast<const Error*>(&e);
  return {stage, judge_id, typed != nullptr ? typed->kind() : ErrorKind::kBackend, e.what()};
}

std::string WeightsDetail(const PipelineConfig& config) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "weights=%g,%g", config.judge_weights[0],
                config.judge_weights[1]);
  return buf;
}

}  // namespace

UtteranceAssessment AssessUtterance(const ManifestRecord& record,
                                    const ListenerProfile& listener,
                                    const PipelineConfig& config, Backends& backends) {
  UtteranceAssessment a;
  a.utterance_id = record.utterance_id;
  a.listener_id = record.listener_id;
  a.system_id = record.system_id;
  a.correctness = record.correctness;

  AudioSignal processed;
  try {
    AudioSignal input = ReadWav(record.signal_path, config.ref_spl_db);
    if (input.sample_rate_hz() != kProcessingRateHz) {
      input = Resample(input, kProcessingRateHz);
    }
    const ListenerChainOptions chain{
        config.better_ear ? DownmixMode::kBetterEar : DownmixMode::kMean, config.compensate};
    processed = ProcessListener(input, listener, chain, &a.trace);
  } catch (const std::exception& e) {
    a.failures.push_back(FailureFrom("simulate", "", e));
    return a;
  }

  JudgePair transcripts;
  try {
    const JudgePayload payload = MakeJudgePayload(processed);
    transcripts = RunJudges(*backends.small, *backends.large, payload, record.utterance_id);
  } catch (const std::exception& e) {
    a.failures.push_back(FailureFrom("judge", "", e));
    return a;
  }
  a.trace.Add("judge", transcripts.small ? "judge=small" : "judge=small failed");
  a.trace.Add("judge", transcripts.large ? "judge=large" : "judge=large failed");
  if (transcripts.small) a.transcript_small = transcripts.small->text;
  if (transcripts.large) a.transcript_large = transcripts.large->text;
  for (const auto& f : transcripts.failures) {
    a.failures.push_back({"judge", f.judge_id, f.kind, f.message});
  }
  if (!transcripts.ok()) return a;

  // Both scores in flight at once; identical texts share one request.
  Scorer& scorer = *backends.scorer;
  auto large = std::async(std::launch::async, [&] {
    return scorer.Score(*a.transcript_large, "large");
  });
  try {
    a.score_small = scorer.Score(*a.transcript_small, "small").value;
  } catch (const std::exception& e) {
    a.failures.push_back(FailureFrom("score", "small", e));
  }
  try {
    a.score_large = large.get().value;
  } catch (const std::exception& e) {
    a.failures.push_back(FailureFrom("score", "large", e));
  }
  a.trace.Add("score", a.score_small ? "judge=small" : "judge=small failed");
  a.trace.Add("score", a.score_large ? "judge=large" : "judge=large failed");
  if (!a.score_small || !a.score_large) return a;

  a.final_score = ScoreAverage(*a.score_small, *a.score_large, config.judge_weights[0],
                               config.judge_weights[1]);
  a.trace.Add("average", WeightsDetail(config));
  return a;
}

EvaluationReport RunPipeline(const std::vector<ManifestRecord>& manifest,
                             const ListenerMap& listeners, const PipelineConfig& config,
                             Backends& backends, const PipelineOptions& options) {
  CheckInputs(manifest, listeners);
  EvaluationReport report;
  report.fingerprint = config.Fingerprint();
  report.utterances.resize(manifest.size());

  const int jobs = options.jobs > 0 ? options.jobs : omp_get_num_procs();
  const auto n = static_cast<long>(manifest.size());
  if (jobs == 1) {
    // The DSP kernels keep their own threads when utterances run one by one.
    for (long i = 0; i < n; ++i) {
      report.utterances[i] = AssessUtterance(
          manifest[i], listeners.find(manifest[i].listener_id)->second, config, backends);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (long i = 0; i < n; ++i) {
      report.utterances[i] = AssessUtterance(
          manifest[i], listeners.find(manifest[i].listener_id)->second, config, backends);
    }
  }

  std::sort(report.utterances.begin(), report.utterances.end(),
            [](const auto& x, const auto& y) { return x.utterance_id < y.utterance_id; });
  std::vector<double> pred;
  std::vector<double> truth;
  for (const auto& u : report.utterances) {
    if (u.failed()) {
      ++report.n_failed;
      continue;
    }
    ++report.n_scored;
    if (u.correctness) {
      pred.push_back(*u.final_score);
      truth.push_back(*u.correctness);
    }
  }
  report.metrics = SummarizeMetrics(pred, truth);
  spdlog::info("scored {} of {} utterances ({} failed)", report.n_scored, manifest.size(),
               report.n_failed);
  return report;
}

std::vector<std::string> DryRunTrace(const ManifestRecord& record,
                                     const ListenerProfile& listener,
                                     const PipelineConfig& config) {
  StageTrace trace;
  const std::array<std::pair<const char*, const Audiogram*>, 2> ears = {
      std::pair{"left", &listener.left}, std::pair{"right", &listener.right}};
  for (const auto& [ear, audiogram] : ears) {
    const std::string detail = std::string("ear=") + ear;
    if (ClassifySeverity(*audiogram) == Severity::kNone) {
      trace.Add("msbg.bypass", detail);
    } else {
      trace.Add("msbg.smear", detail);
      trace.Add("msbg.recruit", detail);
    }
  }
  if (config.compensate) {
    for (const auto& [ear, audiogram] : ears) trace.Add("nalr", std::string("ear=") + ear);
  }
  trace.Add("judge", "judge=small");
  trace.Add("judge", "judge=large");
  trace.Add("score", "judge=small");
  trace.Add("score", "judge=large");
  trace.Add("average", WeightsDetail(config));

  std::vector<std::string> lines;
  for (const auto& r : trace.records()) {
    std::string line = "utterance=" + record.utterance_id + " stage=" + r.stage;
    if (!r.detail.empty()) line += " " + r.detail;
    lines.push_back(std::move(line));
  }
  return lines;
}

namespace {

template <typename T>
ordered_json Optional(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

ordered_json ReportToJson(const EvaluationReport& report) {
  ordered_json utterances = ordered_json::array();
  for (const auto& u : report.utterances) {
    ordered_json failures = ordered_json::array();
    for (const auto& f : u.failures) {
      failures.push_back({{"stage", f.stage},
                          {"judge_id", f.judge_id},
                          {"kind", ErrorKindName(f.kind)},
                          {"message", f.message}});
    }
    utterances.push_back({{"utterance_id", u.utterance_id},
                          {"listener_id", u.listener_id},
                          {"system_id", u.system_id},
                          {"correctness", Optional(u.correctness)},
                          {"transcript_small", Optional(u.transcript_small)},
                          {"transcript_large", Optional(u.transcript_large)},
                          {"score_small", Optional(u.score_small)},
                          {"score_large", Optional(u.score_large)},
                          {"final_score", Optional(u.final_score)},
                          {"failures", failures}});
  }
  const MetricSummary& m = report.metrics;
  return {{"fingerprint", report.fingerprint},
          {"n_utterances", report.utterances.size()},
          {"n_scored", report.n_scored},
          {"n_failed", report.n_failed},
          {"metrics",
           {{"n_labeled", m.n_labeled},
            {"rmse", Optional(m.rmse)},
            {"lcc", Optional(m.lcc)},
            {"srcc", Optional(m.srcc)},
            {"notes", m.notes}}},
          {"utterances", utterances}};
}

std::string RenderReportJson(const EvaluationReport& report) {
  return ReportToJson(report).dump(2, ' ', false, ordered_json::error_handler_t::replace) +
         "\n";
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvNumber(const std::optional<double>& v) {
  return v ? ordered_json(*v).dump() : std::string();
}

}  // namespace

std::string RenderReportCsv(const EvaluationReport& report) {
  std::string out =
      "utterance_id,listener_id,system_id,correctness,score_small,score_large,"
      "final_score,failure\n";
  for (const auto& u : report.utterances) {
    std::string failure;
    if (!u.failures.empty()) {
      const auto& f = u.failures.front();
      failure = f.stage + (f.judge_id.empty() ? "" : "/" + f.judge_id) + ":" +
                std::string(ErrorKindName(f.kind));
    }
    out += CsvField(u.utterance_id) + "," + CsvField(u.listener_id) + "," +
           CsvField(u.system_id) + "," + CsvNumber(u.correctness) + "," +
           CsvNumber(u.score_small) + "," + CsvNumber(u.score_large) + "," +
           CsvNumber(u.final_score) + "," + CsvField(failure) + "\n";
  }
  return out;
}

void WriteReport(const EvaluationReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  for (const auto& [name, text] : {std::pair{"report.json", RenderReportJson(report)},
                                   std::pair{"report.csv", RenderReportCsv(report)}}) {
    std::ofstream out(out_dir / name, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + (out_dir / name).string());
  }
}

int ExitCodeFor(const EvaluationReport& report) {
  return !report.utterances.empty() && report.n_failed == report.utterances.size() ? 2 : 0;
}

std::vector<std::string> RenderImprovement(double rmse_baseline, double rmse_candidate,
                                           std::optional<double> quoted_percent) {
  const double improvement = RelativeImprovement(rmse_baseline, rmse_candidate);
  char buf[256];
  std::vector<std::string> lines;
  std::snprintf(buf, sizeof(buf), "relative RMSE improvement: %.4f%% (baseline %g, candidate %g)",
                improvement, rmse_baseline, rmse_candidate);
  lines.emplace_back(buf);
  if (quoted_percent) {
    if (std::abs(*quoted_percent - improvement) < 0.005) {
      std::snprintf(buf, sizeof(buf), "note: agrees with the quoted %g%%", *quoted_percent);
    } else {
      std::snprintf(buf, sizeof(buf),
                    "note: the quoted figure is %g%%, which these RMSE values do not give "
                    "(computed %.4f%%)",
                    *quoted_percent, improvement);
    }
    lines.emplace_back(buf);
  }
  return lines;
}

}  // namespace hapredict
