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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Every expected value is computed here, not taken from the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "golden.h"
#include "hapredict/audiogram.h"
#include "hapredict/metrics.h"
#include "hapredict/msbg.h"
#include "hapredict/nalr.h"
#include "hapredict/pipeline.h"
#include "hapredict/recruitment.h"
#include "hapredict/scorer.h"
#include "hapredict/smearing.h"
#include "metric_oracle.h"
#include "temp_dir.h"
#include "test_signals.h"

namespace hapredict {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

Outcome MetricOracles() {
  const auto start = Clock::now();
  std::mt19937_64 rng(305);
  std::uniform_int_distribution<int> length(2, 305);
  std::uniform_real_distribution<double> value(0.0, 100.0);
  std::uniform_int_distribution<int> coarse(0, 10);  // forces ties
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = length(rng);
    std::vector<double> p(n), t(n);
    const bool tied = trial % 3 == 0;
    for (int i = 0; i < n; ++i) {
      p[i] = tied ? 10.0 * coarse(rng) : value(rng);
      t[i] = value(rng);
    }
    if (p == std::vector<double>(n, p[0])) p[0] += 1.0;
    worst = std::max(worst, std::abs(Rmse(p, t) - oracle::Rmse(p, t)));
    worst = std::max(worst, std::abs(Lcc(p, t) - oracle::Pearson(p, t)));
    worst = std::max(worst, std::abs(Srcc(p, t) - oracle::Spearman(p, t)));
  }
  const double secs = Seconds(start);
  return {worst <= 1e-9 && secs < 5.0,
          Fmt("1000 vectors, max |diff| %.2e, %.2f s", worst, secs)};
}

Outcome PaperArithmetic() {
  const double baseline = 37.019;
  const double candidate = 34.767;
  const double expected = 100.0 * (baseline - candidate) / baseline;  // 6.08336...
  const double got = RelativeImprovement(baseline, candidate);
  const auto lines = RenderImprovement(baseline, candidate, 2.59);
  const bool rendered = lines.size() == 2 && lines[0].find("6.083") != std::string::npos &&
                        lines[1].find("2.59") != std::string::npos;
  return {std::abs(got - 6.0833) <= 0.001 && std::abs(got - expected) < 1e-12 && rendered,
          Fmt("%.4f%%; renderer: \"%s\" / \"%s\"", got, lines.empty() ? "" : lines[0].c_str(),
              lines.size() < 2 ? "" : lines[1].c_str())};
}

Outcome SmearingIdentity() {
  const SmearMatrix m = BuildSmearMatrix({1.0, 1.0}, kSmearFftSize, kProcessingRateHz);
  double worst = 0.0;
  for (int r = 0; r < m.num_bins(); ++r) {
    for (int c = 0; c < m.num_bins(); ++c) {
      worst = std::max(worst, std::abs(m.at(r, c) - (r == c ? 1.0 : 0.0)));
    }
  }
  const AudioSignal noise = AudioSignal::Mono(
      testing::SpeechShapedNoise(3 * kProcessingRateHz, kProcessingRateHz, 0.1, 3),
      kProcessingRateHz);
  const AudioSignal out = ApplySmearing(noise, m);
  const double err = testing::RelativeL2Error(out.channel(0), noise.channel(0));
  return {worst <= 1e-6 && err <= 1e-3,
          Fmt("max |M - I| %.2e, 3 s noise relative L2 error %.2e", worst, err)};
}

Outcome MsbgBypass() {
  std::mt19937 rng(4);
  std::normal_distribution<double> g(0.0, 0.2);
  std::vector<double> x(kProcessingRateHz);
  for (double& v : x) v = g(rng);
  const AudioSignal in = AudioSignal::Mono(x, kProcessingRateHz);
  const AudioSignal out = SimulateEar(in, Audiogram::Flat(0));
  bool exact = out == in;
  return {exact, exact ? "flat 0 dB HL output equals input bit for bit" : "output differs"};
}

int NearestChannel(const RecruitmentDetail& d, double hz) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(d.channels.size()); ++k) {
    if (std::abs(std::log(d.channels[k].center_hz / hz)) <
        std::abs(std::log(d.channels[best].center_hz / hz))) {
      best = k;
    }
  }
  return best;
}

double MidRms(std::span<const double> x) {
  return testing::RmsOf(x, x.size() / 4, 3 * x.size() / 4);
}

Outcome Recruitment() {
  auto attenuation = [](double level) {
    const AudioSignal tone = testing::ToneAtLevel(1000, level, 1.0);
    const AudioSignal normal = ApplyRecruitment(tone, Audiogram::Flat(0));
    const AudioSignal impaired = ApplyRecruitment(tone, Audiogram::Flat(40));
    return testing::Db(MidRms(normal.channel(0)) / MidRms(impaired.channel(0)));
  };
  const double soft = attenuation(60.0);
  const double loud = attenuation(90.0);

  RecruitmentDetail detail;
  ApplyRecruitment(testing::ToneAtLevel(1000, 105, 1.0), Audiogram::Flat(40), {}, &detail);
  const auto& ch = detail.channels[NearestChannel(detail, 1000)];
  std::vector<double> out(ch.input.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = ch.gain[i] * ch.input[i];
  const double catch_gain = testing::Db(MidRms(out) / MidRms(ch.input));
  return {soft - loud >= 5.0 && std::abs(catch_gain) <= 1.0,
          Fmt("attenuation 60 dB %.2f, 90 dB %.2f, difference %.2f dB; 105 dB tone %+.2f dB",
              soft, loud, soft - loud, catch_gain)};
}

Outcome NalR() {
  // x = 0.05 * (40 + 40 + 40) = 6; G = x + 0.31 * 40 + k.
  const double k[] = {-17, -8, 1, -1, -2, -2};
  const Audiogram flat = Audiogram::Flat(40);
  const Prescription p = Prescribe(flat);
  const FirFilter fir = DesignFir(p, kDefaultFirTaps, kProcessingRateHz);
  double gain_err = 0.0;
  double fir_err = 0.0;
  std::string detail = "gains";
  for (int i = 0; i < 6; ++i) {
    const double hand = 6.0 + 0.31 * 40.0 + k[i];
    gain_err = std::max(gain_err, std::abs(p.gains_db[i] - hand));
    const double response = fir.MagnitudeDb(kPrescriptionFrequenciesHz[i]);
    fir_err = std::max(fir_err, std::abs(response - hand));
    detail += Fmt(" %.1f", p.gains_db[i]);
  }
  bool symmetric = true;
  const size_t n = fir.taps.size();
  for (size_t i = 0; i < n; ++i) symmetric = symmetric && fir.taps[i] == fir.taps[n - 1 - i];
  detail += Fmt("; gain err %.1e dB, FIR err %.3f dB, %s", gain_err, fir_err,
                symmetric ? "taps symmetric" : "taps asymmetric");
  return {gain_err <= 0.01 && fir_err <= 1.0 && symmetric, detail};
}

Outcome GoldenRun() {
  testing::TempDir cache;
  const auto cold = testing::RunGolden(cache.path());
  const std::string golden = testing::ReadFileText(testing::GoldenDir() / "report.json");
  const auto warm = testing::RunGolden(cache.path());
  const bool ok = cold.json == golden && cold.seconds < 60.0 && warm.json == cold.json &&
                  warm.backend_calls == 0;
  return {ok, Fmt("byte-identical %s, %.2f s; warm rerun identical %s with %lld backend calls",
                  cold.json == golden ? "yes" : "no", cold.seconds,
                  warm.json == cold.json ? "yes" : "no",
                  static_cast<long long>(warm.backend_calls))};
}

Outcome ParserRobustness() {
  bool ok = ParseScore(R"({"score": 85})") == 85.0 &&
            ParseScore("Score: 72.5 because it flows") == 72.5 &&
            ParseScore(R"({"score": 140})") == 100.0;
  try {
    ParseScore("no digits here");
    ok = false;
  } catch (const Error& e) {
    ok = ok && e.kind() == ErrorKind::kUnparsableReply;
  }
  std::mt19937 rng(8);
  std::uniform_int_distribution<uint32_t> cp_dist(0, 0x10FFFF);
  std::uniform_int_distribution<int> len(0, 48);
  std::uniform_int_distribution<int> ascii_bias(0, 3);
  const char kHot[] = "0123456789.-+e{}\":score ";
  std::uniform_int_distribution<int> hot(0, sizeof(kHot) - 2);
  int crashes = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string s;
    for (int j = len(rng); j > 0; --j) {
      if (ascii_bias(rng) != 0) {
        s += kHot[hot(rng)];
        continue;
      }
      uint32_t cp = cp_dist(rng);
      if (cp >= 0xD800 && cp <= 0xDFFF) cp = 0xFFFD;
      if (cp < 0x80) {
        s += static_cast<char>(cp);
      } else if (cp < 0x800) {
        s += static_cast<char>(0xC0 | (cp >> 6));
        s += static_cast<char>(0x80 | (cp & 0x3F));
      } else if (cp < 0x10000) {
        s += static_cast<char>(0xE0 | (cp >> 12));
        s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        s += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        s += static_cast<char>(0xF0 | (cp >> 18));
        s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        s += static_cast<char>(0x80 | (cp & 0x3F));
      }
    }
    try {
      const double v = ParseScore(s);
      if (!(v >= 0.0 && v <= 100.0)) ++crashes;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kUnparsableReply) ++crashes;
    } catch (...) {
      ++crashes;
    }
  }
  return {ok && crashes == 0,
          Fmt("examples %s; 100000 random UTF-8 strings, %d bad outcomes", ok ? "ok" : "wrong",
              crashes)};
}

// Stage category of a dry-run line, or -1 for anything unexpected.
int Category(const std::string& line, std::string* judge) {
  const auto stage_at = line.find(" stage=");
  if (stage_at == std::string::npos) return -1;
  const std::string rest = line.substr(stage_at + 7);
  const std::string stage = rest.substr(0, rest.find(' '));
  const auto j = rest.find("judge=");
  *judge = j == std::string::npos ? "" : rest.substr(j + 6);
  if (stage.rfind("msbg.", 0) == 0) return 0;
  if (stage == "nalr") return 1;
  if (stage == "judge") return 2;
  if (stage == "score") return 3;
  if (stage == "average") return 4;
  return -1;
}

Outcome StageOrder() {
  const auto dir = testing::GoldenDir();
  const PipelineConfig config = LoadConfig(dir / "config.toml");
  const auto listeners = LoadListeners(dir / "listeners.json");
  const auto manifest = LoadManifest(dir / "manifest.json", dir / "signals");
  int bad = 0;
  for (const auto& record : manifest) {
    const auto lines = DryRunTrace(record, listeners.find(record.listener_id)->second, config);
    std::vector<int> cats;
    std::vector<std::string> judges;
    for (const auto& line : lines) {
      std::string judge;
      cats.push_back(Category(line, &judge));
      judges.push_back(judge);
    }
    // msbg+ nalr nalr judge(small) judge(large) score(small) score(large) average
    size_t i = 0;
    bool ok = i < cats.size() && cats[i] == 0;
    while (i < cats.size() && cats[i] == 0) ++i;
    const std::vector<std::pair<int, std::string>> tail = {
        {1, ""}, {1, ""}, {2, "small"}, {2, "large"}, {3, "small"}, {3, "large"}, {4, ""}};
    ok = ok && cats.size() - i == tail.size();
    for (size_t k = 0; ok && k < tail.size(); ++k) {
      ok = cats[i + k] == tail[k].first &&
           (tail[k].second.empty() || judges[i + k] == tail[k].second);
    }
    bad += ok ? 0 : 1;
  }
  return {bad == 0, Fmt("%zu utterances, %d out of order", manifest.size(), bad)};
}

}  // namespace
}  // namespace hapredict

int main() {
  using hapredict::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric oracles", hapredict::MetricOracles},
      {"relative improvement arithmetic", hapredict::PaperArithmetic},
      {"smearing identity", hapredict::SmearingIdentity},
      {"msbg bypass", hapredict::MsbgBypass},
      {"recruitment expansion", hapredict::Recruitment},
      {"nal-r prescription and fir", hapredict::NalR},
      {"golden end-to-end run", hapredict::GoldenRun},
      {"score parser robustness", hapredict::ParserRobustness},
      {"dry-run stage order", hapredict::StageOrder},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
