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

// Command-line front end: full runs plus one subcommand per stage.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hapredict/audiogram.h"
#include "hapredict/config.h"
#include "hapredict/error.h"
#include "hapredict/judges.h"
#include "hapredict/metrics.h"
#include "hapredict/msbg.h"
#include "hapredict/nalr.h"
#include "hapredict/pipeline.h"
#include "hapredict/resample.h"
#include "hapredict/scorer.h"
#include "hapredict/wav.h"

namespace fs = std::filesystem;
using hapredict::Error;
using hapredict::ErrorKind;

namespace {

constexpr int kExitConfig = 1;

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

std::array<double, 2> ParseWeights(const std::string& text) {
  double a = 0.0;
  double b = 0.0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> a >> comma >> b) || comma != ',') {
    throw Error(ErrorKind::kConfig, "--judge-weights expects two numbers like 0.5,0.5");
  }
  return {a, b};
}

struct Overrides {
  std::optional<double> ref_spl;
  bool better_ear = false;
  std::string weights;
  std::string prompt_file;
  bool no_compensate = false;

  void Add(CLI::App* app) {
    app->add_option("--ref-spl", ref_spl, "dB SPL of a full-scale RMS of 1.0");
    app->add_flag("--better-ear", better_ear, "transcribe the better ear instead of the mean");
    app->add_option("--judge-weights", weights, "score weights, small,large");
    app->add_option("--prompt-file", prompt_file, "scoring prompt (text or .json)");
    app->add_flag("--no-compensate", no_compensate, "skip NAL-R (ablation)");
  }

  void Apply(hapredict::PipelineConfig& config) const {
    if (ref_spl) config.ref_spl_db = *ref_spl;
    if (better_ear) config.better_ear = true;
    if (!weights.empty()) config.judge_weights = ParseWeights(weights);
    if (!prompt_file.empty()) config.prompt = hapredict::PromptTemplate::Load(prompt_file);
    if (no_compensate) config.compensate = false;
    config.Validate();
  }
};

nlohmann::json FittingJson(const hapredict::ListenerProfile& listener, int rate) {
  nlohmann::json doc = {{"listener", listener.listener_id}, {"sample_rate_hz", rate}};
  const std::pair<const char*, const hapredict::Audiogram*> ears[] = {
      {"left", &listener.left}, {"right", &listener.right}};
  for (const auto& [ear, audiogram] : ears) {
    const auto prescription = hapredict::Prescribe(*audiogram);
    const auto filter = hapredict::SharedFittingFilter(*audiogram, rate);
    nlohmann::json response = nlohmann::json::array();
    for (size_t i = 0; i < hapredict::kPrescriptionFrequenciesHz.size(); ++i) {
      response.push_back(filter->MagnitudeDb(hapredict::kPrescriptionFrequenciesHz[i]));
    }
    doc[ear] = {{"frequencies_hz", hapredict::kPrescriptionFrequenciesHz},
                {"gains_db", prescription.gains_db},
                {"fir_response_db", response},
                {"taps", filter->taps}};
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hearing-aid speech intelligibility prediction from ASR and LLM judges"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");

  // run
  auto* run = app.add_subcommand("run", "process a manifest end to end");
  std::string manifest_path, listeners_path, config_path, cache_dir, out_dir = ".",
                                                                     signals_dir, trace_path;
  int jobs = 0;
  bool dry_run = false;
  Overrides run_overrides;
  run->add_option("--manifest", manifest_path, "CPC-style manifest JSON")->required();
  run->add_option("--listeners", listeners_path, "CPC-style listener JSON")->required();
  run->add_option("--config", config_path, "TOML or JSON config")->required();
  run->add_option("--cache-dir", cache_dir, "transcript and score cache");
  run->add_option("--jobs", jobs, "utterances in parallel (0 = all cores)");
  run->add_option("--out-dir", out_dir, "where report.json and report.csv go");
  run->add_option("--signals-dir", signals_dir, "default: the manifest's directory");
  run->add_option("--trace", trace_path, "write per-utterance stage trace here");
  run->add_flag("--dry-run", dry_run, "print the stage plan and exit");
  run_overrides.Add(run);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "hearing-loss simulation of one file");
  std::string input, output, listener_id, dump_fitting;
  bool compensate = false;
  bool sim_better_ear = false;
  double sim_ref_spl = hapredict::kDefaultRefSplDb;
  simulate->add_option("--input", input)->required();
  simulate->add_option("--output", output)->required();
  simulate->add_option("--listeners", listeners_path)->required();
  simulate->add_option("--listener", listener_id)->required();
  simulate->add_option("--ref-spl", sim_ref_spl, "dB SPL of a full-scale RMS of 1.0");
  simulate->add_flag("--compensate", compensate, "apply NAL-R after the simulation");
  simulate->add_flag("--better-ear", sim_better_ear);
  simulate->add_option("--dump-fitting", dump_fitting, "write NAL-R gains and taps as JSON");

  // transcribe
  auto* transcribe = app.add_subcommand("transcribe", "send one file to the judges");
  std::string utterance_id, which_judge = "both";
  transcribe->add_option("--config", config_path)->required();
  transcribe->add_option("--input", input)->required();
  transcribe->add_option("--utterance-id", utterance_id, "default: input file stem");
  transcribe->add_option("--judge", which_judge)->check(CLI::IsMember({"small", "large", "both"}));
  transcribe->add_option("--cache-dir", cache_dir);

  // score
  auto* score = app.add_subcommand("score", "score one transcript");
  std::string text, transcript_file, judge_id = "small";
  bool has_text = false;
  score->add_option("--config", config_path)->required();
  auto* text_opt = score->add_option("--text", text);
  score->add_option("--transcript-file", transcript_file)->excludes(text_opt);
  score->add_option("--judge-id", judge_id);
  score->add_option("--cache-dir", cache_dir);
  std::string score_prompt;
  score->add_option("--prompt-file", score_prompt);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "metrics and RMSE comparisons");
  std::string report_path;
  std::optional<double> baseline_rmse, candidate_rmse, quoted;
  evaluate->add_option("--report", report_path, "report.json to recompute metrics from");
  evaluate->add_option("--baseline-rmse", baseline_rmse);
  evaluate->add_option("--rmse", candidate_rmse, "default: the report's RMSE");
  evaluate->add_option("--quoted-improvement", quoted, "published percentage to compare");

  CLI11_PARSE(app, argc, argv);

  spdlog::set_default_logger(spdlog::stderr_color_mt("hapredict"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) {
      auto config = hapredict::LoadConfig(config_path);
      run_overrides.Apply(config);
      const auto listeners = hapredict::LoadListeners(listeners_path);
      const auto manifest = hapredict::LoadManifest(
          manifest_path, signals_dir.empty() ? std::nullopt : std::optional<fs::path>(signals_dir));
      hapredict::CheckInputs(manifest, listeners);
      if (dry_run) {
        for (const auto& record : manifest) {
          for (const auto& line : hapredict::DryRunTrace(
                   record, listeners.find(record.listener_id)->second, config)) {
            std::cout << line << "\n";
          }
        }
        return 0;
      }
      auto backends = hapredict::MakeBackends(
          config, cache_dir.empty() ? std::nullopt : std::optional<fs::path>(cache_dir));
      const auto report =
          hapredict::RunPipeline(manifest, listeners, config, backends, {jobs});
      hapredict::WriteReport(report, out_dir);
      if (!trace_path.empty()) {
        std::string lines;
        for (const auto& u : report.utterances) {
          for (const auto& l : u.trace.Lines()) lines += "utterance=" + u.utterance_id + " " + l + "\n";
        }
        WriteText(trace_path, lines);
      }
      std::cout << "scored " << report.n_scored << ", failed " << report.n_failed << "\n";
      if (report.metrics.rmse) std::printf("rmse %.4f\n", *report.metrics.rmse);
      if (report.metrics.lcc) std::printf("lcc  %.4f\n", *report.metrics.lcc);
      if (report.metrics.srcc) std::printf("srcc %.4f\n", *report.metrics.srcc);
      for (const auto& note : report.metrics.notes) std::cout << "note: " << note << "\n";
      return hapredict::ExitCodeFor(report);
    }

    if (*simulate) {
      const auto listeners = hapredict::LoadListeners(listeners_path);
      const auto it = listeners.find(listener_id);
      if (it == listeners.end()) throw Error(ErrorKind::kConfig, "unknown listener " + listener_id);
      auto signal = hapredict::ReadWav(input, sim_ref_spl);
      if (signal.sample_rate_hz() != hapredict::kProcessingRateHz) {
        signal = hapredict::Resample(signal, hapredict::kProcessingRateHz);
      }
      hapredict::StageTrace trace;
      const auto out = hapredict::ProcessListener(
          signal, it->second,
          {sim_better_ear ? hapredict::DownmixMode::kBetterEar : hapredict::DownmixMode::kMean,
           compensate},
          &trace);
      const auto written = hapredict::WriteWav(out, output, hapredict::WavEncoding::kFloat32);
      for (const auto& line : trace.Lines()) std::cout << line << "\n";
      if (written.clip_count > 0) spdlog::warn("{} samples clipped", written.clip_count);
      if (!dump_fitting.empty()) {
        WriteText(dump_fitting, FittingJson(it->second, hapredict::kProcessingRateHz).dump(2) + "\n");
      }
      return 0;
    }

    if (*transcribe) {
      const auto config = hapredict::LoadConfig(config_path);
      auto backends = hapredict::MakeBackends(
          config, cache_dir.empty() ? std::nullopt : std::optional<fs::path>(cache_dir));
      const auto payload = hapredict::MakeJudgePayload(hapredict::ReadWav(input));
      const std::string id = utterance_id.empty() ? fs::path(input).stem().string() : utterance_id;
      nlohmann::json out = nlohmann::json::object();
      for (auto* judge : {backends.small.get(), backends.large.get()}) {
        if (which_judge != "both" && which_judge != judge->config().judge_id) continue;
        const auto t = judge->Transcribe(payload, id);
        out[t.judge_id] = {{"text", t.text}, {"latency_ms", t.latency_ms}, {"cached", t.cached}};
      }
      out["payload_sha256"] = payload.sha256;
      std::cout << out.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
      return 0;
    }

    if (*score) {
      auto config = hapredict::LoadConfig(config_path);
      if (!score_prompt.empty()) config.prompt = hapredict::PromptTemplate::Load(score_prompt);
      has_text = score->count("--text") > 0;
      if (!has_text && transcript_file.empty()) {
        throw Error(ErrorKind::kConfig, "score needs --text or --transcript-file");
      }
      const std::string transcript = has_text ? text : ReadText(transcript_file);
      auto backends = hapredict::MakeBackends(
          config, cache_dir.empty() ? std::nullopt : std::optional<fs::path>(cache_dir));
      const auto s = backends.scorer->Score(transcript, judge_id);
      std::cout << nlohmann::json{{"judge_id", s.judge_id},
                                  {"score", s.value},
                                  {"raw_reply", s.raw_reply},
                                  {"cached", s.cached}}
                       .dump(2, ' ', false, nlohmann::json::error_handler_t::replace)
                << "\n";
      return 0;
    }

    if (*evaluate) {
      std::optional<double> report_rmse;
      if (!report_path.empty()) {
        const auto doc = nlohmann::json::parse(ReadText(report_path), nullptr, false);
        if (doc.is_discarded() || !doc.contains("utterances")) {
          throw Error(ErrorKind::kConfig, "not a report: " + report_path);
        }
        std::vector<double> pred, truth;
        for (const auto& u : doc["utterances"]) {
          if (u["final_score"].is_number() && u["correctness"].is_number()) {
            pred.push_back(u["final_score"].get<double>());
            truth.push_back(u["correctness"].get<double>());
          }
        }
        const auto m = hapredict::SummarizeMetrics(pred, truth);
        std::printf("n_labeled %zu\n", m.n_labeled);
        if (m.rmse) std::printf("rmse %.4f\n", *m.rmse);
        if (m.lcc) std::printf("lcc  %.4f\n", *m.lcc);
        if (m.srcc) std::printf("srcc %.4f\n", *m.srcc);
        for (const auto& note : m.notes) std::cout << "note: " << note << "\n";
        report_rmse = m.rmse;
      }
      if (baseline_rmse) {
        const auto candidate = candidate_rmse ? candidate_rmse : report_rmse;
        if (!candidate) throw Error(ErrorKind::kConfig, "--baseline-rmse needs --rmse or --report");
        for (const auto& line : hapredict::RenderImprovement(*baseline_rmse, *candidate, quoted)) {
          std::cout << line << "\n";
        }
      } else if (report_path.empty()) {
        throw Error(ErrorKind::kConfig, "evaluate needs --report or --baseline-rmse");
      }
      return 0;
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", hapredict::ErrorKindName(e.kind()), e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  return 0;
}
