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

#ifndef HAPREDICT_PIPELINE_H_
#define HAPREDICT_PIPELINE_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hapredict/audiogram.h"
#include "hapredict/cache.h"
#include "hapredict/config.h"
#include "hapredict/error.h"
#include "hapredict/judges.h"
#include "hapredict/msbg.h"
#include "hapredict/scorer.h"

namespace hapredict {

struct ManifestRecord {
  std::string utterance_id;
  std::filesystem::path signal_path;
  std::string listener_id;
  std::string system_id;
  std::optional<double> correctness;  // percent, [0, 100]
};

// CPC metadata shape: an array of objects with "signal", "listener",
// "system" and optional "correctness". "signal_path" overrides the default
// `<signals_dir>/<signal>.wav`; relative paths resolve against signals_dir.
// Throws Error(kConfig).
std::vector<ManifestRecord> ParseManifest(const nlohmann::json& doc,
                                          const std::filesystem::path& signals_dir);
// signals_dir defaults to the manifest's directory.
std::vector<ManifestRecord> LoadManifest(
    const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& signals_dir = std::nullopt);

// Every listener id resolves and every signal file exists, else
// Error(kConfig) naming all problems.
void CheckInputs(const std::vector<ManifestRecord>& manifest, const ListenerMap& listeners);

struct StageFailure {
  std::string stage;     // ingest, simulate, judge, score
  std::string judge_id;  // empty unless a judge or its score failed
  ErrorKind kind = ErrorKind::kBackend;
  std::string message;
};

struct UtteranceAssessment {
  std::string utterance_id;
  std::string listener_id;
  std::string system_id;
  std::optional<double> correctness;
  std::optional<std::string> transcript_small;
  std::optional<std::string> transcript_large;
  std::optional<double> score_small;
  std::optional<double> score_large;
  std::optional<double> final_score;
  std::vector<StageFailure> failures;
  StageTrace trace;

  bool failed() const { return !final_score.has_value(); }
};

struct MetricSummary {
  size_t n_labeled = 0;
  std::optional<double> rmse;
  std::optional<double> lcc;
  std::optional<double> srcc;
  std::vector<std::string> notes;  // why a metric is absent
};

// Absent metrics instead of errors: rmse needs one pair, correlations two
// and nonconstant inputs.
MetricSummary SummarizeMetrics(std::span<const double> pred, std::span<const double> truth);

struct EvaluationReport {
  std::vector<UtteranceAssessment> utterances;  // sorted by utterance_id
  size_t n_scored = 0;
  size_t n_failed = 0;
  MetricSummary metrics;
  std::string fingerprint;
};

// Judges, scorer and their caches built from a config.
struct Backends {
  std::unique_ptr<JsonCache> transcript_cache;
  std::unique_ptr<JsonCache> score_cache;
  std::unique_ptr<Judge> small;
  std::unique_ptr<Judge> large;
  std::unique_ptr<Scorer> scorer;
};

// Caches go to `<cache_dir>/transcripts` and `<cache_dir>/scores`, or stay in
// memory without a directory.
Backends MakeBackends(const PipelineConfig& config,
                      const std::optional<std::filesystem::path>& cache_dir,
                      const RetryPolicy& retry = DefaultRetryPolicy());

struct PipelineOptions {
  int jobs = 0;  // 0 = all cores
};

// One utterance through every stage. Never throws; failures are recorded.
UtteranceAssessment AssessUtterance(const ManifestRecord& record,
                                    const ListenerProfile& listener,
                                    const PipelineConfig& config, Backends& backends);

// Aborts with Error(kConfig) on unresolved inputs before any processing.
EvaluationReport RunPipeline(const std::vector<ManifestRecord>& manifest,
                             const ListenerMap& listeners, const PipelineConfig& config,
                             Backends& backends, const PipelineOptions& options = {});

// The stages a run would apply to one utterance, without doing any work.
std::vector<std::string> DryRunTrace(const ManifestRecord& record,
                                     const ListenerProfile& listener,
                                     const PipelineConfig& config);

// Deterministic: no timings, no cache flags.
nlohmann::ordered_json ReportToJson(const EvaluationReport& report);
std::string RenderReportJson(const EvaluationReport& report);
std::string RenderReportCsv(const EvaluationReport& report);
void WriteReport(const EvaluationReport& report, const std::filesystem::path& out_dir);

// 0 normally, 2 when every utterance failed.
int ExitCodeFor(const EvaluationReport& report);

// Relative RMSE improvement, plus a note comparing it with a quoted figure.
std::vector<std::string> RenderImprovement(double rmse_baseline, double rmse_candidate,
                                           std::optional<double> quoted_percent);

}  // namespace hapredict

#endif  // HAPREDICT_PIPELINE_H_
