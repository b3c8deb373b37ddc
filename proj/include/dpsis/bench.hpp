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

// Experiment harness: runs every (method, epsilon, k, trial) cell of a
// benchmark on a worker pool and scores it against a reference set.
//
// Cell seeds are DeriveSeed(master_seed, {method id, epsilon bits, k,
// trial}), with epsilon bits = 0 for deterministic methods. A cell therefore
// replays identically in isolation, and output does not depend on worker
// count or scheduling because rows are sorted before they are written.

#ifndef DPSIS_BENCH_HPP_
#define DPSIS_BENCH_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dpsis/csv.hpp"
#include "dpsis/dataset.hpp"
#include "dpsis/errors.hpp"
#include "dpsis/lipschitz_topk.hpp"
#include "dpsis/metrics.hpp"
#include "dpsis/random.hpp"
#include "dpsis/selectors.hpp"

namespace dpsis {

// ---------------------------------------------------------------------------
// Worker pool

inline constexpr const char* kWorkersEnvVar = "DPSIS_WORKERS";

// requested > 0 wins; then $DPSIS_WORKERS; then hardware concurrency.
inline std::size_t ResolveWorkers(std::size_t requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkersEnvVar)) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// thrown by any task is rethrown after all threads join.
template <class Fn>
void ParallelFor(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Configuration

enum class Method : int { kSis = 0, kDpSis, kTwoStage, kDpTwoStage, kLassoTopK };

inline constexpr Method kAllMethods[] = {Method::kSis, Method::kDpSis,
                                         Method::kTwoStage, Method::kDpTwoStage,
                                         Method::kLassoTopK};

inline const char* MethodName(Method m) {
  switch (m) {
    case Method::kSis: return "sis";
    case Method::kDpSis: return "dp-sis";
    case Method::kTwoStage: return "two-stage";
    case Method::kDpTwoStage: return "dp-two-stage";
    case Method::kLassoTopK: return "lasso-topk";
  }
  return "?";
}

inline Method ParseMethod(const std::string& name) {
  for (Method m : kAllMethods)
    if (name == MethodName(m)) return m;
  throw InvalidArgument("unknown method '" + name +
                        "' (expected sis, dp-sis, two-stage, dp-two-stage, "
                        "lasso-topk)");
}

inline bool IsPrivate(Method m) {
  return m == Method::kDpSis || m == Method::kDpTwoStage;
}

enum class SourceKind { kCsv, kFan, kInstabilityW1, kInstabilityW1W2 };

struct DatasetSource {
  SourceKind kind = SourceKind::kFan;
  std::string csv_path;
  std::string target = "y";
  SynthSpec synth;        // kFan; synth.seed is the data seed
  uint64_t data_seed = 0; // instability designs

  bool synthetic() const { return kind != SourceKind::kCsv; }

  std::string Name() const {
    switch (kind) {
      case SourceKind::kCsv: {
        const auto slash = csv_path.find_last_of('/');
        return slash == std::string::npos ? csv_path : csv_path.substr(slash + 1);
      }
      case SourceKind::kFan:
        return "synth-fan-n" + std::to_string(synth.n) + "-d" + std::to_string(synth.d);
      case SourceKind::kInstabilityW1: return "instability-w1";
      case SourceKind::kInstabilityW1W2: return "instability-w1w2";
    }
    return "?";
  }

  // Loads or generates the dataset, preprocessed. `seed_override` replaces
  // the configured data seed for synthetic sources.
  Dataset Load(std::optional<uint64_t> seed_override = std::nullopt) const {
    switch (kind) {
      case SourceKind::kCsv: return Preprocess(LoadCsv(csv_path, target));
      case SourceKind::kFan: {
        SynthSpec s = synth;
        if (seed_override) s.seed = *seed_override;
        return GenSynthFan(s);
      }
      case SourceKind::kInstabilityW1:
        return Preprocess(GenInstabilityW1(seed_override.value_or(data_seed)));
      case SourceKind::kInstabilityW1W2:
        return Preprocess(GenInstabilityW1W2(seed_override.value_or(data_seed)));
    }
    throw InvalidArgument("unknown dataset source");
  }

  uint64_t BaseSeed() const { return kind == SourceKind::kFan ? synth.seed : data_seed; }
};

// Default privacy grid: 15 log-spaced points from 0.1 to 20.
inline std::vector<double> DefaultEpsilonGrid() {
  std::vector<double> grid;
  constexpr int kPoints = 15;
  const double lo = std::log(0.1), hi = std::log(20.0);
  for (int i = 0; i < kPoints; ++i)
    grid.push_back(std::exp(lo + (hi - lo) * i / (kPoints - 1)));
  grid.front() = 0.1;
  grid.back() = 20.0;
  return grid;
}

struct ExperimentConfig {
  DatasetSource dataset;
  std::vector<Method> methods = {Method::kDpSis, Method::kDpTwoStage};
  std::vector<double> epsilons = DefaultEpsilonGrid();
  std::vector<std::size_t> ks = {5};
  std::size_t trials = 100;
  uint64_t master_seed = 0;
  double lambda = 0.1;
  double gamma = 0.5;
  std::string output_dir = ".";
  // Synthetic sources only: draw a fresh dataset for every trial index
  // (seed DeriveSeed(data seed, {trial})) instead of one shared draw.
  bool resample_data = false;
  // Fill wall_time_ms. Off by default because timings are not reproducible.
  bool record_timing = false;

  void Validate() const {
    DPSIS_REQUIRE(trials >= 1, "trials must be at least 1");
    DPSIS_REQUIRE(!ks.empty(), "at least one k is required");
    DPSIS_REQUIRE(!methods.empty(), "at least one method is required");
    const bool any_private =
        std::any_of(methods.begin(), methods.end(), IsPrivate);
    DPSIS_REQUIRE(!any_private || !epsilons.empty(),
                  "private methods need at least one epsilon");
    for (double e : epsilons)
      DPSIS_REQUIRE(e > 0.0 && std::isfinite(e), "epsilons must be positive");
    for (std::size_t k : ks) DPSIS_REQUIRE(k >= 1, "k must be at least 1");
    DPSIS_REQUIRE(lambda >= 0.0, "lambda must be nonnegative");
    DPSIS_REQUIRE(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    DPSIS_REQUIRE(!resample_data || dataset.synthetic(),
                  "resample_data requires a synthetic dataset source");
  }
};

struct ResultRow {
  std::string dataset_name;
  std::string method;
  std::optional<double> epsilon;  // empty for deterministic methods
  std::size_t k = 0;
  std::size_t trial_index = 0;
  uint64_t seed = 0;
  double accuracy = 0.0;
  bool top = false;
  bool great = false;
  bool good = false;
  std::optional<double> wall_time_ms;
};

// ---------------------------------------------------------------------------
// Execution

inline uint64_t CellSeed(uint64_t master, Method m, std::optional<double> eps,
                         std::size_t k, std::size_t trial) {
  return DeriveSeed(master, {static_cast<uint64_t>(m), eps ? DoubleBits(*eps) : 0,
                             static_cast<uint64_t>(k), static_cast<uint64_t>(trial)});
}

// Everything about one dataset draw that cells share read-only.
struct PreparedData {
  Dataset data;
  std::vector<std::size_t> correlation_order;  // ranked reference for TGG
  std::map<std::size_t, IndexSet> reference;   // per k
  std::map<std::size_t, std::string> reference_kind;
  std::vector<double> support_counts;          // two-stage, if needed
};

inline PreparedData PrepareData(Dataset ds, const ExperimentConfig& cfg) {
  PreparedData p;
  p.data = std::move(ds);
  const ScoreVector corr(CorrelationScores(p.data), 1.0);
  p.correlation_order = corr.order();
  LassoParams lasso;
  lasso.lambda = cfg.lambda;
  for (std::size_t k : cfg.ks) {
    DPSIS_REQUIRE(k < p.data.features(),
                  "k = " + std::to_string(k) + " must be smaller than d = " +
                      std::to_string(p.data.features()));
    if (p.data.has_true_support() && k <= p.data.true_support.size()) {
      IndexSet ref(p.data.true_support.begin(),
                   p.data.true_support.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(ref.begin(), ref.end());
      p.reference[k] = std::move(ref);
      p.reference_kind[k] = "true_support";
    } else {
      p.reference[k] = LassoTopK(p.data, lasso, k).indices;
      p.reference_kind[k] = "lasso_topk";
    }
  }
  const bool two_stage = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
    return m == Method::kTwoStage || m == Method::kDpTwoStage;
  });
  if (two_stage) p.support_counts = SupportCounts(p.data, 0, lasso);
  return p;
}

struct Cell {
  Method method;
  std::optional<double> epsilon;
  std::size_t k;
  std::size_t trial;
};

inline std::vector<Cell> EnumerateCells(const ExperimentConfig& cfg) {
  std::vector<Method> methods = cfg.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  std::vector<double> eps = cfg.epsilons;
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  std::vector<std::size_t> ks = cfg.ks;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<Cell> cells;
  for (Method m : methods) {
    std::vector<std::optional<double>> grid;
    if (IsPrivate(m))
      grid.assign(eps.begin(), eps.end());
    else
      grid.push_back(std::nullopt);
    for (const auto& e : grid)
      for (std::size_t k : ks)
        for (std::size_t t = 0; t < cfg.trials; ++t) cells.push_back({m, e, k, t});
  }
  return cells;
}

// Runs one cell against prepared data. Exposed for replaying a single row.
inline ResultRow RunCell(const Cell& cell, const PreparedData& prep,
                         const ExperimentConfig& cfg, const std::string& name) {
  const auto start = std::chrono::steady_clock::now();
  ResultRow row;
  row.dataset_name = name;
  row.method = MethodName(cell.method);
  row.epsilon = cell.epsilon;
  row.k = cell.k;
  row.trial_index = cell.trial;
  row.seed = CellSeed(cfg.master_seed, cell.method, cell.epsilon, cell.k, cell.trial);

  Rng rng(row.seed);
  LassoParams lasso;
  lasso.lambda = cfg.lambda;
  IndexSet selected;
  switch (cell.method) {
    case Method::kSis:
      selected = Sis(prep.data, cell.k);
      break;
    case Method::kDpSis:
      selected = DpSis(prep.data, cell.k, *cell.epsilon, cfg.gamma, rng).indices;
      break;
    case Method::kTwoStage:
    case Method::kDpTwoStage: {
      TwoStageParams tp;
      tp.k = cell.k;
      tp.lasso = lasso;
      tp.private_selection = cell.method == Method::kDpTwoStage;
      tp.epsilon = cell.epsilon.value_or(1.0);
      tp.gamma = cfg.gamma;
      selected = SelectFromCounts(prep.support_counts, tp, rng);
      break;
    }
    case Method::kLassoTopK:
      selected = LassoTopK(prep.data, lasso, cell.k).indices;
      break;
  }

  row.accuracy = TopKAccuracy(selected, prep.reference.at(cell.k));
  const TggFlags flags =
      ComputeTggFlags(selected, RankedReference{prep.correlation_order, cell.k});
  row.top = flags.top;
  row.great = flags.great;
  row.good = flags.good;
  if (cfg.record_timing)
    row.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return row;
}

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  // Reference provenance per k ("true_support" or "lasso_topk").
  std::map<std::size_t, std::string> reference_kind;
};

inline ExperimentOutput RunExperimentDetailed(const ExperimentConfig& cfg,
                                              std::size_t workers = 0) {
  cfg.Validate();
  workers = ResolveWorkers(workers);
  const std::string name = cfg.dataset.Name();

  std::vector<PreparedData> prepared(cfg.resample_data ? cfg.trials : 1);
  ParallelFor(prepared.size(), workers, [&](std::size_t i) {
    const auto seed = cfg.resample_data
                          ? std::optional<uint64_t>(DeriveSeed(cfg.dataset.BaseSeed(), {i}))
                          : std::nullopt;
    prepared[i] = PrepareData(cfg.dataset.Load(seed), cfg);
  });

  const std::vector<Cell> cells = EnumerateCells(cfg);
  ExperimentOutput out;
  out.rows.resize(cells.size());
  ParallelFor(cells.size(), workers, [&](std::size_t i) {
    const PreparedData& prep = prepared[cfg.resample_data ? cells[i].trial : 0];
    out.rows[i] = RunCell(cells[i], prep, cfg, name);
  });

  // EnumerateCells already yields (method, epsilon, k, trial) order; the
  // stable sort makes the contract explicit.
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     const auto key = [](const ResultRow& r) {
                       return std::make_tuple(static_cast<int>(ParseMethod(r.method)),
                                              r.epsilon.value_or(-1.0), r.k,
                                              r.trial_index);
                     };
                     return key(a) < key(b);
                   });
  out.reference_kind = prepared.front().reference_kind;
  return out;
}

inline std::vector<ResultRow> RunExperiment(const ExperimentConfig& cfg,
                                            std::size_t workers = 0) {
  return RunExperimentDetailed(cfg, workers).rows;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr const char* kResultCsvHeader =
    "dataset_name,method,epsilon,k,trial_index,seed,accuracy,top,great,good,"
    "wall_time_ms";

inline std::string FormatG6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline void WriteResultCsv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.dataset_name << ',' << r.method << ','
        << (r.epsilon ? FormatG6(*r.epsilon) : "NA") << ',' << r.k << ','
        << r.trial_index << ',' << r.seed << ',' << FormatG6(r.accuracy) << ','
        << (r.top ? "true" : "false") << ',' << (r.great ? "true" : "false")
        << ',' << (r.good ? "true" : "false") << ','
        << (r.wall_time_ms ? FormatG6(*r.wall_time_ms) : "NA") << '\n';
  }
}

inline void EmitCsv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write results CSV: " + path);
  WriteResultCsv(rows, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

// One plotted series: mean accuracy per epsilon for a (method, k) pair.
// Deterministic methods have a single point at epsilon = -1 and are drawn
// as a flat line across the epsilon range.
struct AccuracySeries {
  std::string method;
  std::size_t k = 0;
  std::vector<std::pair<double, double>> points;  // (epsilon, mean accuracy)
  bool flat = false;
};

inline std::vector<AccuracySeries> SummarizeAccuracy(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<int, std::size_t>, std::map<double, std::pair<double, std::size_t>>> acc;
  for (const auto& r : rows) {
    auto& cell = acc[{static_cast<int>(ParseMethod(r.method)), r.k}]
                    [r.epsilon.value_or(-1.0)];
    cell.first += r.accuracy;
    cell.second += 1;
  }
  std::vector<AccuracySeries> series;
  for (const auto& [key, by_eps] : acc) {
    AccuracySeries s;
    s.method = MethodName(static_cast<Method>(std::get<0>(key)));
    s.k = std::get<1>(key);
    for (const auto& [eps, sum] : by_eps)
      s.points.emplace_back(eps, sum.first / static_cast<double>(sum.second));
    s.flat = !IsPrivate(static_cast<Method>(std::get<0>(key)));
    series.push_back(std::move(s));
  }
  return series;
}

// Standalone SVG: log-scale epsilon on x, mean top-k accuracy on y, one
// polyline per (method, k) with a legend.
inline std::string RenderAccuracySvg(const std::vector<ResultRow>& rows) {
  DPSIS_REQUIRE(!rows.empty(), "cannot plot an empty result set");
  const auto series = SummarizeAccuracy(rows);

  double lo = 0.1, hi = 20.0;
  bool any_eps = false;
  for (const auto& r : rows) {
    if (!r.epsilon) continue;
    lo = any_eps ? std::min(lo, *r.epsilon) : *r.epsilon;
    hi = any_eps ? std::max(hi, *r.epsilon) : *r.epsilon;
    any_eps = true;
  }
  if (hi <= lo) {
    lo /= 2.0;
    hi *= 2.0;
  }

  constexpr double kW = 720, kH = 440, kLeft = 70, kRight = 200, kTop = 30, kBottom = 60;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  const auto px = [&](double e) {
    return kLeft + pw * (std::log10(e) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
  };
  const auto py = [&](double a) { return kTop + ph * (1.0 - a); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  const char* dashes[] = {"none", "6,3", "2,3", "8,3,2,3"};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  // Axes.
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw
      << "\" y2=\"" << kTop + ph << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double a = i / 5.0;
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << py(a) << "\" x2=\"" << kLeft
        << "\" y2=\"" << py(a) << "\" stroke=\"black\"/>"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(a) + 4
        << "\" text-anchor=\"end\">" << FormatG6(a) << "</text>\n";
  }
  for (int p = static_cast<int>(std::floor(std::log10(lo)));
       p <= static_cast<int>(std::ceil(std::log10(hi))); ++p) {
    const double e = std::pow(10.0, p);
    if (e < lo * (1 - 1e-9) || e > hi * (1 + 1e-9)) continue;
    svg << "<line x1=\"" << px(e) << "\" y1=\"" << kTop + ph << "\" x2=\"" << px(e)
        << "\" y2=\"" << kTop + ph + 4 << "\" stroke=\"black\"/>"
        << "<text x=\"" << px(e) << "\" y=\"" << kTop + ph + 18
        << "\" text-anchor=\"middle\">" << FormatG6(e) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 15
      << "\" text-anchor=\"middle\">epsilon (log scale)</text>\n"
      << "<text transform=\"translate(18," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">mean top-k accuracy</text>\n";

  std::map<std::size_t, std::size_t> k_slot;
  for (const auto& s : series) k_slot.emplace(s.k, k_slot.size());
  std::map<std::string, std::size_t> method_slot;
  for (const auto& s : series) method_slot.emplace(s.method, method_slot.size());

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = colors[method_slot[s.method] % std::size(colors)];
    const char* dash = dashes[k_slot[s.k] % std::size(dashes)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (std::string(dash) != "none") svg << " stroke-dasharray=\"" << dash << '"';
    svg << " points=\"";
    if (s.flat) {
      const double a = s.points.front().second;
      svg << px(lo) << ',' << py(a) << ' ' << px(hi) << ',' << py(a);
    } else {
      for (std::size_t j = 0; j < s.points.size(); ++j)
        svg << (j ? " " : "") << px(s.points[j].first) << ',' << py(s.points[j].second);
    }
    svg << "\"/>\n";
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 15;
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 30 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (std::string(dash) != "none") svg << " stroke-dasharray=\"" << dash << '"';
    svg << "/><text x=\"" << lx + 36 << "\" y=\"" << ly + 4 << "\">" << s.method
        << " (k=" << s.k << ")</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

inline void EmitAccuracyPlot(const std::vector<ResultRow>& rows, const std::string& path) {
  const std::string svg = RenderAccuracySvg(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write plot: " + path);
  out << svg;
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Instability replication

// Per-feature selection counts of SIS and non-private two-stage over
// repeated draws of one instability design.
struct InstabilityCounts {
  std::vector<std::size_t> sis;
  std::vector<std::size_t> two_stage;
};

// Column normalization applied before the non-private comparison.
enum class Scaling { kUnitVariance, kInfinityNorm };

inline const char* ScalingName(Scaling s) {
  return s == Scaling::kUnitVariance ? "unit-variance" : "inf-norm";
}

inline Scaling ParseScaling(const std::string& name) {
  if (name == "unit-variance") return Scaling::kUnitVariance;
  if (name == "inf-norm") return Scaling::kInfinityNorm;
  throw InvalidArgument("unknown scaling '" + name +
                        "' (expected unit-variance or inf-norm)");
}

struct InstabilityReport {
  InstabilityCounts w1;
  InstabilityCounts w1w2;
  std::size_t reps = 0;
  Scaling scaling = Scaling::kUnitVariance;
};

// k = 5 for both selectors; two-stage uses floor(sqrt(N)) = 10 contiguous
// blocks. Draw `rep` of design D uses seed DeriveSeed(master, {D, rep}).
// Both selectors are non-private here, so by default the columns get the
// classical unit-variance screening normalization.
inline InstabilityReport ReplicateInstability(std::size_t reps, uint64_t master_seed,
                                              const LassoParams& lasso,
                                              std::size_t workers = 0,
                                              Scaling scaling = Scaling::kUnitVariance) {
  DPSIS_REQUIRE(reps >= 1, "reps must be at least 1");
  constexpr std::size_t kSelect = 5;
  workers = ResolveWorkers(workers);
  InstabilityReport report;
  report.reps = reps;
  report.scaling = scaling;
  for (int design = 0; design < 2; ++design) {
    std::vector<IndexSet> sis(reps), two(reps);
    ParallelFor(reps, workers, [&](std::size_t r) {
      const uint64_t seed = DeriveSeed(master_seed, {static_cast<uint64_t>(design), r});
      Dataset raw = design == 0 ? GenInstabilityW1(seed) : GenInstabilityW1W2(seed);
      const Dataset ds = scaling == Scaling::kUnitVariance ? Standardize(std::move(raw))
                                                           : Preprocess(std::move(raw));
      sis[r] = Sis(ds, kSelect);
      TwoStageParams tp;
      tp.k = kSelect;
      tp.lasso = lasso;
      two[r] = TwoStageSelect(ds, tp, seed);
    });
    InstabilityCounts& c = design == 0 ? report.w1 : report.w1w2;
    c.sis.assign(kInstabilityFeatures, 0);
    c.two_stage.assign(kInstabilityFeatures, 0);
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t j : sis[r]) ++c.sis[j];
      for (std::size_t j : two[r]) ++c.two_stage[j];
    }
  }
  return report;
}

inline void EmitInstabilityCsv(const InstabilityReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write instability CSV: " + path);
  out << "feature_index,w1_sis,w1_two_stage,w1w2_sis,w1w2_two_stage\n";
  for (std::size_t j = 0; j < rep.w1.sis.size(); ++j)
    out << j << ',' << rep.w1.sis[j] << ',' << rep.w1.two_stage[j] << ','
        << rep.w1w2.sis[j] << ',' << rep.w1w2.two_stage[j] << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace dpsis

#endif  // DPSIS_BENCH_HPP_
