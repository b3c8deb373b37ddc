//
// Copyright 2026 The dpsis Authors
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
//

#include "dpsis/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace dpsis {
namespace {

ExperimentConfig SmallConfig() {
  ExperimentConfig cfg;
  cfg.dataset.kind = SourceKind::kFan;
  cfg.dataset.synth.d = 200;
  cfg.dataset.synth.seed = 3;
  cfg.methods = {Method::kSis, Method::kDpSis, Method::kTwoStage, Method::kDpTwoStage,
                 Method::kLassoTopK};
  cfg.epsilons = {0.5, 5.0};
  cfg.ks = {5, 8};
  cfg.trials = 3;
  cfg.master_seed = 42;
  return cfg;
}

std::string CsvText(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  WriteResultCsv(rows, out);
  return out.str();
}

std::size_t CountOf(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  for (std::size_t workers : {1u, 3u, 16u}) {
    std::vector<std::atomic<int>> hits(1000);
    ParallelFor(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
  ParallelFor(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelForTest, PropagatesExceptions) {
  EXPECT_THROW(ParallelFor(100, 4,
                           [](std::size_t i) {
                             if (i == 37) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

TEST(ParallelForTest, WorkerResolution) {
  EXPECT_EQ(ResolveWorkers(3), 3u);
  ::setenv(kWorkersEnvVar, "5", 1);
  EXPECT_EQ(ResolveWorkers(), 5u);
  ::setenv(kWorkersEnvVar, "junk", 1);
  EXPECT_GE(ResolveWorkers(), 1u);
  ::unsetenv(kWorkersEnvVar);
  EXPECT_GE(ResolveWorkers(), 1u);
}

TEST(MethodTest, NamesRoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(ParseMethod(MethodName(m)), m);
  EXPECT_THROW(ParseMethod("lasso"), InvalidArgument);
  EXPECT_TRUE(IsPrivate(Method::kDpSis));
  EXPECT_FALSE(IsPrivate(Method::kLassoTopK));
}

TEST(ConfigTest, DefaultGridIsLogSpaced) {
  const auto g = DefaultEpsilonGrid();
  ASSERT_EQ(g.size(), 15u);
  EXPECT_EQ(g.front(), 0.1);
  EXPECT_EQ(g.back(), 20.0);
  const double ratio = g[1] / g[0];
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], ratio, 1e-9);
}

TEST(ConfigTest, ValidationErrors) {
  ExperimentConfig cfg = SmallConfig();
  cfg.trials = 0;
  EXPECT_THROW(RunExperiment(cfg, 1), InvalidArgument);
  cfg = SmallConfig();
  cfg.epsilons.clear();
  EXPECT_THROW(RunExperiment(cfg, 1), InvalidArgument);
  cfg.methods = {Method::kSis};
  EXPECT_NO_THROW(RunExperiment(cfg, 1));
  cfg = SmallConfig();
  cfg.ks = {200};
  EXPECT_THROW(RunExperiment(cfg, 1), InvalidArgument);
  cfg = SmallConfig();
  cfg.dataset.kind = SourceKind::kCsv;
  cfg.dataset.csv_path = "/nonexistent/data.csv";
  EXPECT_THROW(RunExperiment(cfg, 1), IoError);
  cfg.resample_data = true;
  EXPECT_THROW(RunExperiment(cfg, 1), InvalidArgument);
}

TEST(RunExperimentTest, RowCountAndOrder) {
  ExperimentConfig cfg;
  cfg.dataset.synth.seed = 1;
  cfg.methods = {Method::kDpSis, Method::kDpTwoStage};
  cfg.ks = {5, 8};
  cfg.trials = 10;
  const auto rows = RunExperiment(cfg, 2);
  ASSERT_EQ(rows.size(), 2u * 15u * 2u * 10u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto key = [](const ResultRow& r) {
      return std::make_tuple(static_cast<int>(ParseMethod(r.method)), *r.epsilon, r.k,
                             r.trial_index);
    };
    ASSERT_LT(key(rows[i - 1]), key(rows[i]));
  }
  for (const auto& r : rows) {
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
    EXPECT_EQ(r.dataset_name, "synth-fan-n100-d2000");
    EXPECT_FALSE(r.wall_time_ms.has_value());
  }
}

TEST(RunExperimentTest, DeterministicMethodsUsePlaceholderEpsilon) {
  ExperimentConfig cfg = SmallConfig();
  cfg.methods = {Method::kSis};
  const auto a = RunExperiment(cfg, 1);
  ASSERT_EQ(a.size(), cfg.ks.size() * cfg.trials);
  for (const auto& r : a) EXPECT_FALSE(r.epsilon.has_value());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(a[i].accuracy, a[i - i % cfg.trials].accuracy);
  EXPECT_EQ(CsvText(a), CsvText(RunExperiment(cfg, 1)));
  EXPECT_NE(CsvText(a).find(",NA,"), std::string::npos);
}

TEST(RunExperimentTest, CsvIndependentOfWorkerCount) {
  const ExperimentConfig cfg = SmallConfig();
  const std::string one = CsvText(RunExperiment(cfg, 1));
  EXPECT_EQ(one, CsvText(RunExperiment(cfg, 4)));
  EXPECT_EQ(one, CsvText(RunExperiment(cfg, 8)));
  ExperimentConfig other = cfg;
  other.master_seed = 43;
  EXPECT_NE(one, CsvText(RunExperiment(other, 1)));
}

TEST(RunExperimentTest, ResampledDataIsDeterministicToo) {
  ExperimentConfig cfg = SmallConfig();
  cfg.resample_data = true;
  const std::string one = CsvText(RunExperiment(cfg, 1));
  EXPECT_EQ(one, CsvText(RunExperiment(cfg, 3)));
  cfg.resample_data = false;
  EXPECT_NE(one, CsvText(RunExperiment(cfg, 1)));
}

TEST(RunExperimentTest, EveryRowReplaysFromItsSeed) {
  const ExperimentConfig cfg = SmallConfig();
  const auto rows = RunExperiment(cfg, 2);
  const Dataset ds = cfg.dataset.Load();
  const PreparedData prep = PrepareData(ds, cfg);
  for (const auto& r : rows) {
    const Method m = ParseMethod(r.method);
    ASSERT_EQ(r.seed, CellSeed(cfg.master_seed, m, r.epsilon, r.k, r.trial_index));
    if (m == Method::kDpSis) {
      // Independent replay through the public selector with the row's seed.
      const auto sel = DpSis(ds, r.k, *r.epsilon, cfg.gamma, r.seed);
      ASSERT_EQ(TopKAccuracy(sel.indices, prep.reference.at(r.k)), r.accuracy);
    }
    const ResultRow again = RunCell({m, r.epsilon, r.k, r.trial_index}, prep, cfg, r.dataset_name);
    ASSERT_EQ(CsvText({again}), CsvText({r}));
  }
}

TEST(RunExperimentTest, ReferenceFallsBackToLassoBeyondSupport) {
  ExperimentConfig cfg = SmallConfig();
  cfg.methods = {Method::kSis};
  cfg.ks = {5, 12};
  const auto out = RunExperimentDetailed(cfg, 1);
  EXPECT_EQ(out.reference_kind.at(5), "true_support");
  EXPECT_EQ(out.reference_kind.at(12), "lasso_topk");
}

TEST(RunExperimentTest, TimingIsOptIn) {
  ExperimentConfig cfg = SmallConfig();
  cfg.methods = {Method::kSis};
  cfg.record_timing = true;
  for (const auto& r : RunExperiment(cfg, 1)) {
    ASSERT_TRUE(r.wall_time_ms.has_value());
    EXPECT_GE(*r.wall_time_ms, 0.0);
  }
}

// ---------------------------------------------------------------------------

TEST(EmitCsvTest, HeaderAndFormatting) {
  EXPECT_EQ(CsvText({}), std::string(kResultCsvHeader) + "\n");
  ResultRow a{"ds", "dp-sis", 0.123456789, 5, 0, 99, 2.0 / 3.0, true, true, false, 1.5};
  ResultRow b{"ds", "sis", std::nullopt, 5, 1, 7, 1.0, false, false, false, std::nullopt};
  const std::string text = CsvText({a, b, a});
  EXPECT_EQ(CountOf(text, "\n"), 4u);
  std::istringstream in(text);
  std::string header, l1, l2;
  std::getline(in, header);
  std::getline(in, l1);
  std::getline(in, l2);
  EXPECT_EQ(l1, "ds,dp-sis,0.123457,5,0,99,0.666667,true,true,false,1.5");
  EXPECT_EQ(l2, "ds,sis,NA,5,1,7,1,false,false,false,NA");
}

TEST(EmitCsvTest, WritesFilesByteIdentically) {
  const auto dir = std::filesystem::temp_directory_path() / "dpsis_bench_emit";
  std::filesystem::create_directories(dir);
  ExperimentConfig cfg = SmallConfig();
  cfg.trials = 1;
  const auto rows = RunExperiment(cfg, 1);
  EmitCsv(rows, (dir / "a.csv").string());
  EmitCsv(rows, (dir / "b.csv").string());
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_THROW(EmitCsv(rows, (dir / "missing" / "x.csv").string()), IoError);
  std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------------------

std::vector<std::string> PolylinePoints(const std::string& svg) {
  std::vector<std::string> out;
  const std::regex re("<polyline[^>]*points=\"([^\"]*)\"");
  for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it)
    out.push_back((*it)[1]);
  return out;
}

std::vector<std::string> PolylineStrokes(const std::string& svg) {
  std::vector<std::string> out;
  const std::regex re("<polyline[^>]*stroke=\"([^\"]*)\"");
  for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it)
    out.push_back((*it)[1]);
  return out;
}

ResultRow Row(const std::string& method, std::optional<double> eps, std::size_t k,
              double acc) {
  ResultRow r;
  r.dataset_name = "ds";
  r.method = method;
  r.epsilon = eps;
  r.k = k;
  r.accuracy = acc;
  return r;
}

TEST(PlotTest, OnePolylinePerSeries) {
  const std::vector<ResultRow> one{Row("dp-sis", 0.1, 5, 0.0), Row("dp-sis", 1.0, 5, 0.4),
                                   Row("dp-sis", 1.0, 5, 0.6), Row("dp-sis", 10.0, 5, 1.0)};
  const std::string svg = RenderAccuracySvg(one);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_EQ(svg.find("href"), std::string::npos);
  const auto pts = PolylinePoints(svg);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(CountOf(pts[0], ","), 3u);
  EXPECT_NE(svg.find("dp-sis (k=5)"), std::string::npos);

  auto two = one;
  two.push_back(Row("dp-two-stage", 0.1, 5, 0.0));
  two.push_back(Row("dp-two-stage", 10.0, 5, 0.2));
  const auto svg2 = RenderAccuracySvg(two);
  const auto strokes = PolylineStrokes(svg2);
  ASSERT_EQ(strokes.size(), 2u);
  EXPECT_NE(strokes[0], strokes[1]);
  EXPECT_THROW(RenderAccuracySvg({}), InvalidArgument);
}

TEST(PlotTest, SeriesAreTrialMeans) {
  const auto s = SummarizeAccuracy({Row("dp-sis", 1.0, 5, 0.2), Row("dp-sis", 1.0, 5, 0.6),
                                    Row("sis", std::nullopt, 5, 0.8)});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].method, "sis");
  EXPECT_TRUE(s[0].flat);
  EXPECT_EQ(s[1].method, "dp-sis");
  EXPECT_NEAR(s[1].points.at(0).second, 0.4, 1e-12);
}

// ---------------------------------------------------------------------------

TEST(InstabilityTest, CountsAreDeterministicAndBounded) {
  const auto a = ReplicateInstability(20, 5, LassoParams{}, 1);
  const auto b = ReplicateInstability(20, 5, LassoParams{}, 4);
  EXPECT_EQ(a.w1.sis, b.w1.sis);
  EXPECT_EQ(a.w1w2.two_stage, b.w1w2.two_stage);
  for (const auto* c : {&a.w1, &a.w1w2}) {
    ASSERT_EQ(c->sis.size(), 100u);
    std::size_t total_sis = 0, total_two = 0;
    for (std::size_t j = 0; j < 100; ++j) {
      EXPECT_LE(c->sis[j], 20u);
      total_sis += c->sis[j];
      total_two += c->two_stage[j];
    }
    EXPECT_EQ(total_sis, 100u);
    EXPECT_EQ(total_two, 100u);
  }
  EXPECT_THROW(ReplicateInstability(0, 5, LassoParams{}, 1), InvalidArgument);
}

TEST(InstabilityTest, ScalingChoiceIsHonoured) {
  const auto uv = ReplicateInstability(30, 6, LassoParams{}, 1, Scaling::kUnitVariance);
  const auto inf = ReplicateInstability(30, 6, LassoParams{}, 1, Scaling::kInfinityNorm);
  EXPECT_EQ(uv.scaling, Scaling::kUnitVariance);
  EXPECT_EQ(inf.scaling, Scaling::kInfinityNorm);
  EXPECT_NE(uv.w1.two_stage, inf.w1.two_stage);
  EXPECT_EQ(ParseScaling(ScalingName(Scaling::kInfinityNorm)), Scaling::kInfinityNorm);
  EXPECT_THROW(ParseScaling("z-score"), InvalidArgument);
}

}  // namespace
}  // namespace dpsis
