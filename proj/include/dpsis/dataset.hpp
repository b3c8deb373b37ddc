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

#ifndef DPSIS_DATASET_HPP_
#define DPSIS_DATASET_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpsis/errors.hpp"
#include "dpsis/random.hpp"

namespace dpsis {

// Feature indices, 0-based. Selection routines return them sorted ascending.
using IndexSet = std::vector<std::size_t>;

// N individuals (rows) by d features (columns) plus a target per row.
//
// `true_support` is only known for synthetic data. It is ordered by
// decreasing |true weight| (ties by index) so that the first k entries are
// the k most important features; `true_weights` holds the generating weight
// vector before any rescaling.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> true_support;
  Eigen::VectorXd true_weights;
  // Centered columns and y scaled to infinity-norm 1 (see Preprocess). This
  // is what bounds each correlation score's sensitivity by 1.
  bool preprocessed = false;
  // Centered unit-variance columns (see Standardize). Fine for non-private
  // selection, not for the private mechanisms.
  bool standardized = false;

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(X.cols()); }
  bool has_true_support() const { return !true_support.empty(); }

  void Validate() const {
    DPSIS_REQUIRE(X.rows() >= 1 && X.cols() >= 1,
                  "dataset needs at least one row and one feature");
    DPSIS_REQUIRE(y.size() == X.rows(), "target length must equal row count");
    DPSIS_REQUIRE(feature_names.empty() || feature_names.size() == features(),
                  "feature_names must be empty or have one entry per column");
    for (std::size_t j : true_support)
      DPSIS_REQUIRE(j < features(), "true_support index out of range");
  }
};

// Centers every column, then scales it to infinity-norm 1; scales y to
// infinity-norm 1 without centering it. All-zero columns (after centering)
// pass through as zeros.
inline Dataset Preprocess(Dataset ds) {
  ds.Validate();
  DPSIS_REQUIRE(!ds.preprocessed && !ds.standardized,
                "dataset is already preprocessed");
  for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
    auto col = ds.X.col(j);
    col.array() -= col.mean();
    const double norm = col.cwiseAbs().maxCoeff();
    if (norm > 0.0) col /= norm;
  }
  const double ynorm = ds.y.cwiseAbs().maxCoeff();
  if (ynorm > 0.0) ds.y /= ynorm;
  ds.preprocessed = true;
  return ds;
}

// Classical screening normalization: centers every column and scales it to
// unit (population) variance; y is scaled to infinity-norm 1 as in
// Preprocess. Ranking by |x_(i)^T y| then ranks by absolute sample
// correlation. Constant columns pass through as zeros.
inline Dataset Standardize(Dataset ds) {
  ds.Validate();
  DPSIS_REQUIRE(!ds.preprocessed && !ds.standardized,
                "dataset is already preprocessed");
  const double n = static_cast<double>(ds.X.rows());
  for (Eigen::Index j = 0; j < ds.X.cols(); ++j) {
    auto col = ds.X.col(j);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0.0) col /= sd;
  }
  const double ynorm = ds.y.cwiseAbs().maxCoeff();
  if (ynorm > 0.0) ds.y /= ynorm;
  ds.standardized = true;
  return ds;
}

// Parameters of the sparse linear benchmark model
//   y = X w + noise,  X_ij ~ N(0, 1),  noise_i ~ N(0, noise_variance),
// with `n_nonzero` weights w_i = (-1)^u (a + |z|), u ~ Bernoulli(bernoulli_p),
// z ~ N(0, 1) and a = 4 ln(n) / sqrt(n).
struct SynthSpec {
  std::size_t n = 100;
  std::size_t d = 2000;
  std::size_t n_nonzero = 8;
  double noise_variance = 1.5;
  double bernoulli_p = 0.4;
  uint64_t seed = 0;

  void Validate() const {
    DPSIS_REQUIRE(n >= 1 && d >= 1, "synthetic dataset needs n >= 1, d >= 1");
    DPSIS_REQUIRE(n_nonzero <= d, "n_nonzero must not exceed d");
    DPSIS_REQUIRE(noise_variance > 0.0, "noise_variance must be positive");
    DPSIS_REQUIRE(bernoulli_p >= 0.0 && bernoulli_p <= 1.0,
                  "bernoulli_p must lie in [0, 1]");
  }
};

// Minimum nonzero weight magnitude for the benchmark model.
inline double SynthWeightFloor(std::size_t n) {
  const double nn = static_cast<double>(n);
  return 4.0 * std::log(nn) / std::sqrt(nn);
}

namespace internal {

// Stream tags keep generators with equal seeds on unrelated streams.
enum GeneratorTag : uint64_t {
  kFanTag = 1,
  kInstabilityW1Tag = 2,
  kInstabilityW1W2Tag = 3,
};

template <class URBG>
Eigen::MatrixXd GaussianMatrix(std::size_t rows, std::size_t cols,
                               URBG& rng) {
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill so that row i's draws do not depend on the column count
  // of later rows.
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = StandardNormal(rng);
  return m;
}

inline std::vector<std::size_t> OrderByMagnitude(const Eigen::VectorXd& w) {
  std::vector<std::size_t> support;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) support.push_back(static_cast<std::size_t>(j));
  std::stable_sort(support.begin(), support.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::abs(w[a]) > std::abs(w[b]);
                   });
  return support;
}

inline Dataset FinishInstability(Eigen::MatrixXd X, Eigen::VectorXd y) {
  Dataset ds;
  ds.X = std::move(X);
  ds.y = std::move(y);
  ds.true_weights = Eigen::VectorXd::Zero(ds.X.cols());
  ds.true_weights.head(5).setOnes();
  ds.true_support = {0, 1, 2, 3, 4};
  return ds;
}

}  // namespace internal

// Sparse linear benchmark dataset, preprocessed. Deterministic in spec.seed.
inline Dataset GenSynthFan(const SynthSpec& spec) {
  spec.Validate();
  Rng rng(DeriveSeed(spec.seed, {internal::kFanTag}));

  Eigen::MatrixXd X = internal::GaussianMatrix(spec.n, spec.d, rng);

  // Partial Fisher-Yates picks n_nonzero distinct support indices.
  std::vector<std::size_t> perm(spec.d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < spec.n_nonzero; ++i) {
    const std::size_t j = i + UniformIndex(rng, spec.d - i);
    std::swap(perm[i], perm[j]);
  }

  const double a = SynthWeightFloor(spec.n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(spec.d);
  for (std::size_t i = 0; i < spec.n_nonzero; ++i) {
    const bool negative = OpenUniform(rng) < spec.bernoulli_p;
    const double z = StandardNormal(rng);
    w[perm[i]] = (negative ? -1.0 : 1.0) * (a + std::abs(z));
  }

  const double noise_sd = std::sqrt(spec.noise_variance);
  Eigen::VectorXd noise(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i)
    noise[i] = noise_sd * StandardNormal(rng);

  Dataset ds;
  ds.y = X * w + noise;
  ds.X = std::move(X);
  ds.true_support = internal::OrderByMagnitude(w);
  ds.true_weights = std::move(w);
  return Preprocess(std::move(ds));
}

// Noise variance of the two instability designs.
inline constexpr double kInstabilityNoiseVariance = 0.1;
inline constexpr std::size_t kInstabilityRows = 100;
inline constexpr std::size_t kInstabilityFeatures = 100;

// 100 x 100 Gaussian design, y = X w1 + noise with w1 = 1 on features 0..4.
// Returned raw (not preprocessed).
inline Dataset GenInstabilityW1(uint64_t seed) {
  Rng rng(DeriveSeed(seed, {internal::kInstabilityW1Tag}));
  Eigen::MatrixXd X =
      internal::GaussianMatrix(kInstabilityRows, kInstabilityFeatures, rng);
  const double sd = std::sqrt(kInstabilityNoiseVariance);
  Eigen::VectorXd y(kInstabilityRows);
  for (std::size_t i = 0; i < kInstabilityRows; ++i)
    y[i] = X.row(i).head(5).sum() + sd * StandardNormal(rng);
  return internal::FinishInstability(std::move(X), std::move(y));
}

// True when row `i` (0-based) of the W1/W2 design is generated from w2.
inline bool IsInstabilityOutlierRow(std::size_t i) { return (i + 1) % 10 == 0; }

// As GenInstabilityW1, but every tenth row (rows 9, 19, ..., 99) follows
// w2 = 1 on features 95..99 instead, so each contiguous block of ten rows
// carries exactly one outlier.
inline Dataset GenInstabilityW1W2(uint64_t seed) {
  Rng rng(DeriveSeed(seed, {internal::kInstabilityW1W2Tag}));
  Eigen::MatrixXd X =
      internal::GaussianMatrix(kInstabilityRows, kInstabilityFeatures, rng);
  const double sd = std::sqrt(kInstabilityNoiseVariance);
  Eigen::VectorXd y(kInstabilityRows);
  for (std::size_t i = 0; i < kInstabilityRows; ++i) {
    const double signal = IsInstabilityOutlierRow(i) ? X.row(i).tail(5).sum()
                                                      : X.row(i).head(5).sum();
    y[i] = signal + sd * StandardNormal(rng);
  }
  return internal::FinishInstability(std::move(X), std::move(y));
}

}  // namespace dpsis

#endif  // DPSIS_DATASET_HPP_
