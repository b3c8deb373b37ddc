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

// Command-line front end: dataset generation, one-shot selection, benchmark
// runs, the recovery-bound calculator and the instability replication.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpsis/dpsis.hpp"

namespace {

using namespace dpsis;

struct SourceOptions {
  std::string data;
  std::string target = "y";
  std::string synthetic;
  std::size_t n = 100;
  std::size_t d = 2000;
  std::size_t n_nonzero = 8;
  double noise_variance = 1.5;
  double bernoulli_p = 0.4;
  uint64_t data_seed = 0;

  void Register(CLI::App* app) {
    app->add_option("--data", data, "CSV file, one row per individual");
    app->add_option("--target", target, "Target column name or 0-based index")
        ->capture_default_str();
    app->add_option("--synthetic", synthetic, "Synthetic source instead of --data")
        ->check(CLI::IsMember({"fan", "w1", "w1w2"}));
    app->add_option("--n", n, "Synthetic sample count")->capture_default_str();
    app->add_option("--d", d, "Synthetic feature count")->capture_default_str();
    app->add_option("--n-nonzero", n_nonzero, "Nonzero weights (fan)")->capture_default_str();
    app->add_option("--noise-variance", noise_variance, "Noise variance (fan)")
        ->capture_default_str();
    app->add_option("--bernoulli-p", bernoulli_p, "Sign probability (fan)")
        ->capture_default_str();
    app->add_option("--data-seed", data_seed, "Seed of the synthetic draw")
        ->capture_default_str();
  }

  DatasetSource Build() const {
    DatasetSource src;
    if (!data.empty() && !synthetic.empty())
      throw InvalidArgument("use either --data or --synthetic, not both");
    if (!data.empty()) {
      src.kind = SourceKind::kCsv;
      src.csv_path = data;
      src.target = target;
      if (!std::filesystem::exists(data))
        throw IoError("dataset file not found: " + data);
      return src;
    }
    if (synthetic.empty()) throw InvalidArgument("one of --data or --synthetic is required");
    src.data_seed = data_seed;
    src.synth = SynthSpec{n, d, n_nonzero, noise_variance, bernoulli_p, data_seed};
    if (synthetic == "fan") {
      src.kind = SourceKind::kFan;
      src.synth.Validate();
    } else if (synthetic == "w1") {
      src.kind = SourceKind::kInstabilityW1;
    } else {
      src.kind = SourceKind::kInstabilityW1W2;
    }
    return src;
  }
};

int RunGen(const std::string& kind, const SynthSpec& spec, const std::string& out) {
  Dataset ds;
  KeyValues meta;
  if (kind == "fan") {
    ds = GenSynthFan(spec);
    meta = {{"n", std::to_string(spec.n)},
            {"d", std::to_string(spec.d)},
            {"n_nonzero", std::to_string(spec.n_nonzero)},
            {"noise_variance", FormatG6(spec.noise_variance)},
            {"bernoulli_p", FormatG6(spec.bernoulli_p)},
            {"seed", std::to_string(spec.seed)}};
  } else {
    ds = kind == "w1" ? GenInstabilityW1(spec.seed) : GenInstabilityW1W2(spec.seed);
    meta = {{"seed", std::to_string(spec.seed)},
            {"noise_variance", FormatG6(kInstabilityNoiseVariance)}};
  }
  WriteCsv(ds, out);
  WriteKeyValues(SyntheticMetadata(ds, kind, meta), out + ".meta",
                 "synthetic dataset metadata; indices are 0-based");
  std::cout << "wrote " << out << " (" << ds.rows() << " x " << ds.features()
            << ") and " << out << ".meta\n";
  return 0;
}

int RunSelect(const SourceOptions& src_opts, const std::string& method_name,
              std::size_t k, double epsilon, double gamma, uint64_t seed,
              double lambda, std::size_t blocks) {
  const Method method = ParseMethod(method_name);
  const Dataset ds = src_opts.Build().Load();
  LassoParams lasso;
  lasso.lambda = lambda;
  IndexSet selected;
  Rng rng(seed);
  switch (method) {
    case Method::kSis: selected = Sis(ds, k); break;
    case Method::kDpSis: selected = DpSis(ds, k, epsilon, gamma, rng).indices; break;
    case Method::kTwoStage:
    case Method::kDpTwoStage: {
      TwoStageParams tp;
      tp.k = k;
      tp.block_count = blocks;
      tp.lasso = lasso;
      tp.private_selection = method == Method::kDpTwoStage;
      tp.epsilon = epsilon;
      tp.gamma = gamma;
      selected = TwoStageSelect(ds, tp, rng);
      break;
    }
    case Method::kLassoTopK: {
      const auto r = LassoTopK(ds, lasso, k);
      if (r.padded)
        std::cerr << "warning: fewer than k nonzero LASSO coefficients; padded\n";
      selected = r.indices;
      break;
    }
  }
  std::cout << JoinIndices(selected) << '\n';
  return 0;
}

int RunBench(const SourceOptions& src_opts, const std::vector<std::string>& methods,
             const std::vector<double>& epsilons, const std::vector<std::size_t>& ks,
             std::size_t trials, uint64_t seed, double lambda, double gamma,
             const std::string& out_dir, bool resample, bool timing,
             std::size_t workers) {
  ExperimentConfig cfg;
  cfg.dataset = src_opts.Build();
  cfg.methods.clear();
  for (const auto& m : methods) cfg.methods.push_back(ParseMethod(m));
  if (!epsilons.empty()) cfg.epsilons = epsilons;
  cfg.ks = ks;
  cfg.trials = trials;
  cfg.master_seed = seed;
  cfg.lambda = lambda;
  cfg.gamma = gamma;
  cfg.output_dir = out_dir;
  cfg.resample_data = resample;
  cfg.record_timing = timing;

  const ExperimentOutput out = RunExperimentDetailed(cfg, workers);
  std::filesystem::create_directories(out_dir);
  const std::string csv = out_dir + "/results.csv";
  const std::string svg = out_dir + "/accuracy.svg";
  EmitCsv(out.rows, csv);
  EmitAccuracyPlot(out.rows, svg);

  KeyValues meta{{"dataset", cfg.dataset.Name()},
                 {"master_seed", std::to_string(seed)},
                 {"trials", std::to_string(trials)},
                 {"lambda", FormatG6(lambda)},
                 {"gamma", FormatG6(gamma)},
                 {"resample_data", resample ? "true" : "false"},
                 {"tgg_reference", "correlation_order"}};
  for (const auto& [k, kind] : out.reference_kind)
    meta["reference_k" + std::to_string(k)] = kind;
  WriteKeyValues(meta, out_dir + "/run.meta", "benchmark run metadata");
  std::cout << "wrote " << out.rows.size() << " rows to " << csv << " and plot to "
            << svg << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private feature selection from correlations"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset as CSV + metadata");
  std::string gen_kind = "fan";
  std::string gen_out;
  SynthSpec gen_spec;
  gen->add_option("--kind", gen_kind, "fan | w1 | w1w2")
      ->check(CLI::IsMember({"fan", "w1", "w1w2"}))
      ->capture_default_str();
  gen->add_option("--n", gen_spec.n, "Sample count (fan)")->capture_default_str();
  gen->add_option("--d", gen_spec.d, "Feature count (fan)")->capture_default_str();
  gen->add_option("--n-nonzero", gen_spec.n_nonzero, "Nonzero weights (fan)")
      ->capture_default_str();
  gen->add_option("--noise-variance", gen_spec.noise_variance, "Noise variance (fan)")
      ->capture_default_str();
  gen->add_option("--bernoulli-p", gen_spec.bernoulli_p, "Sign probability (fan)")
      ->capture_default_str();
  gen->add_option("--seed", gen_spec.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV path")->required();

  // select
  auto* sel = app.add_subcommand("select", "Run one selection and print the indices");
  SourceOptions sel_src;
  sel_src.Register(sel);
  std::string sel_method = "dp-sis";
  std::size_t sel_k = 5, sel_blocks = 0;
  double sel_eps = 1.0, sel_gamma = 0.5, sel_lambda = 0.1;
  uint64_t sel_seed = 0;
  sel->add_option("--method", sel_method, "sis | dp-sis | two-stage | dp-two-stage | lasso-topk")
      ->capture_default_str();
  sel->add_option("--k", sel_k, "Number of features")->capture_default_str();
  sel->add_option("--epsilon", sel_eps, "Privacy loss")->capture_default_str();
  sel->add_option("--gamma", sel_gamma, "Loss parameter in [0, 1)")->capture_default_str();
  sel->add_option("--lambda", sel_lambda, "LASSO penalty")->capture_default_str();
  sel->add_option("--blocks", sel_blocks, "Two-stage blocks (0 = floor(sqrt(N)))")
      ->capture_default_str();
  sel->add_option("--seed", sel_seed, "Mechanism seed")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark grid and write CSV + SVG");
  std::string bench_config;
  bench->add_option("--config", bench_config,
                    "Plain-text config: one 'key = value' per line (keys are "
                    "option names without dashes); flags override it");
  SourceOptions bench_src;
  bench_src.Register(bench);
  std::vector<std::string> bench_methods{"dp-sis", "dp-two-stage"};
  std::vector<double> bench_eps;
  std::vector<std::size_t> bench_ks{5};
  std::size_t bench_trials = 100, bench_workers = 0;
  uint64_t bench_seed = 0;
  double bench_lambda = 0.1, bench_gamma = 0.5;
  std::string bench_out = "bench_out";
  bool bench_resample = false, bench_timing = false;
  bench->add_option("--methods", bench_methods, "Comma-separated methods")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--epsilons", bench_eps,
                    "Comma-separated epsilons (default: 15 log-spaced in [0.1, 20])")
      ->delimiter(',');
  bench->add_option("--ks", bench_ks, "Comma-separated k values")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--trials", bench_trials, "Trials per cell")->capture_default_str();
  bench->add_option("--seed", bench_seed, "Master seed")->capture_default_str();
  bench->add_option("--lambda", bench_lambda, "LASSO penalty")->capture_default_str();
  bench->add_option("--gamma", bench_gamma, "Loss parameter in [0, 1)")->capture_default_str();
  bench->add_option("--out-dir", bench_out, "Output directory")->capture_default_str();
  bench->add_flag("--resample-data", bench_resample,
                  "Draw a fresh synthetic dataset per trial");
  bench->add_flag("--timing", bench_timing, "Record wall_time_ms (not reproducible)");
  bench->add_option("--workers", bench_workers,
                    "Worker threads (0 = $DPSIS_WORKERS or all cores)")
      ->capture_default_str();

  // bound
  auto* bound = app.add_subcommand("bound", "Exact-recovery probability lower bound");
  BoundInput bin;
  bound->add_option("--d", bin.d, "Feature count")->required();
  bound->add_option("--k", bin.k, "Selected features")->required();
  bound->add_option("--xi", bin.xi, "Gap between k-th and (k+1)-th score")->required();
  bound->add_option("--gamma", bin.gamma, "Loss parameter in (0, 1]")->capture_default_str();
  bound->add_option("--epsilon", bin.epsilon, "Privacy loss")->required();

  // replicate-instability
  auto* inst = app.add_subcommand("replicate-instability",
                                  "Per-feature selection counts of SIS vs two-stage");
  std::size_t inst_reps = 1000, inst_workers = 0;
  uint64_t inst_seed = 0;
  double inst_lambda = 0.1;
  std::string inst_out = "instability_counts.csv";
  std::string inst_scaling = "unit-variance";
  inst->add_option("--reps", inst_reps, "Repetitions per design")->capture_default_str();
  inst->add_option("--seed", inst_seed, "Master seed")->capture_default_str();
  inst->add_option("--lambda", inst_lambda, "LASSO penalty")->capture_default_str();
  inst->add_option("--out", inst_out, "Output CSV path")->capture_default_str();
  inst->add_option("--workers", inst_workers, "Worker threads")->capture_default_str();
  inst->add_option("--scaling", inst_scaling, "Column normalization")
      ->check(CLI::IsMember({"unit-variance", "inf-norm"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*bench && !bench_config.empty()) {
      // Re-parse with the file's settings placed ahead of the explicit
      // arguments; options already given on the command line are skipped.
      std::vector<std::string> args{argv[0], "bench"};
      for (const auto& [key, value] : ReadKeyValues(bench_config)) {
        const CLI::Option* opt = bench->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config")
          throw InvalidArgument("unknown key '" + key + "' in " + bench_config);
        if (opt->count() > 0) continue;
        if (opt->get_expected_min() == 0) {
          if (value == "true" || value == "1") args.push_back("--" + key);
        } else {
          args.push_back("--" + key + "=" + value);
        }
      }
      bool after_sub = false;
      for (int i = 1; i < argc; ++i) {
        if (after_sub) args.emplace_back(argv[i]);
        if (std::string(argv[i]) == "bench") after_sub = true;
      }
      std::vector<char*> ptrs;
      for (auto& a : args) ptrs.push_back(a.data());
      app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*gen) return RunGen(gen_kind, gen_spec, gen_out);
    if (*sel)
      return RunSelect(sel_src, sel_method, sel_k, sel_eps, sel_gamma, sel_seed,
                       sel_lambda, sel_blocks);
    if (*bench)
      return RunBench(bench_src, bench_methods, bench_eps, bench_ks, bench_trials,
                      bench_seed, bench_lambda, bench_gamma, bench_out, bench_resample,
                      bench_timing, bench_workers);
    if (*bound) {
      std::printf("%.10g\n", RecoveryBound(bin));
      return 0;
    }
    if (*inst) {
      LassoParams lasso;
      lasso.lambda = inst_lambda;
      const auto report = ReplicateInstability(inst_reps, inst_seed, lasso, inst_workers,
                                               ParseScaling(inst_scaling));
      EmitInstabilityCsv(report, inst_out);
      std::cout << "wrote " << inst_out << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
