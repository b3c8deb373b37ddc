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

#ifndef DPSIS_SELECTORS_HPP_
#define DPSIS_SELECTORS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpsis/dataset.hpp"
#include "dpsis/errors.hpp"
#include "dpsis/lipschitz_topk.hpp"
#include "dpsis/random.hpp"

namespace dpsis {

namespace internal {

// Private selection needs the infinity-norm bounds.
inline void RequirePreprocessed(const Dataset& ds) {
  ds.Validate();
  DPSIS_REQUIRE(ds.preprocessed,
                "dataset must be preprocessed (centered columns, "
                "infinity-norm <= 1) before private selection");
}

// Non-private selection accepts either normalization.
inline void RequireScaled(const Dataset& ds) {
  ds.Validate();
  DPSIS_REQUIRE(ds.preprocessed || ds.standardized,
                "dataset must be preprocessed or standardized before selection");
}

}  // namespace internal

// k largest entries of `scores`, ties by ascending index; result sorted.
inline IndexSet TopKIndices(std::span<const double> scores, std::size_t k) {
  DPSIS_REQUIRE(k >= 1 && k <= scores.size(), "k must lie in [1, d]");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// |x_(i)^T y| for every column i.
inline std::vector<double> CorrelationScores(const Dataset& ds) {
  const Eigen::VectorXd s = (ds.X.transpose() * ds.y).cwiseAbs();
  return {s.data(), s.data() + s.size()};
}

// ---------------------------------------------------------------------------
// Sure independence screening

inline IndexSet Sis(const Dataset& ds, std::size_t k) {
  internal::RequireScaled(ds);
  DPSIS_REQUIRE(k >= 1 && k <= ds.features(), "k must lie in [1, d]");
  return TopKIndices(CorrelationScores(ds), k);
}

// SIS with the top-k step replaced by the canonical Lipschitz mechanism.
// Preprocessing bounds every column and y in infinity-norm by 1, so each
// score |x_(i)^T y| moves by at most 1 when one row changes.
template <class URBG>
SelectionResult DpSis(const Dataset& ds, std::size_t k, double epsilon,
                      double gamma, URBG& rng) {
  internal::RequirePreprocessed(ds);
  const ScoreVector scores(CorrelationScores(ds), 1.0);
  return LipschitzTopK(scores, MechanismParams{k, epsilon, gamma}, rng);
}

inline SelectionResult DpSis(const Dataset& ds, std::size_t k, double epsilon,
                             double gamma, uint64_t seed) {
  Rng rng(seed);
  SelectionResult r = DpSis(ds, k, epsilon, gamma, rng);
  r.seed = seed;
  return r;
}

// ---------------------------------------------------------------------------
// LASSO

struct LassoParams {
  double lambda = 0.1;
  double tol = 1e-4;
  std::size_t max_iter = 1000;
  double support_threshold = 1e-6;

  void Validate() const {
    DPSIS_REQUIRE(lambda >= 0.0, "lambda must be nonnegative");
    DPSIS_REQUIRE(tol > 0.0, "tol must be positive");
    DPSIS_REQUIRE(max_iter >= 1, "max_iter must be at least 1");
  }
};

struct LassoResult {
  Eigen::VectorXd weights;
  std::size_t sweeps = 0;
  bool converged = false;
  // Objective before the first sweep, then after each sweep.
  std::vector<double> objective_trace;
};

inline double LassoObjective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Eigen::Ref<const Eigen::VectorXd>& y,
                             const Eigen::VectorXd& w, double lambda) {
  const double n = static_cast<double>(X.rows());
  return (y - X * w).squaredNorm() / (2.0 * n) + lambda * w.lpNorm<1>();
}

inline double SoftThreshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

// Cyclic coordinate descent on (1 / 2N) ||y - X w||^2 + lambda ||w||_1.
// Works on any row subset; no preprocessing requirement.
inline LassoResult LassoCdRaw(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::VectorXd>& y,
                              const LassoParams& params) {
  params.Validate();
  DPSIS_REQUIRE(X.rows() == y.size() && X.rows() >= 1, "shape mismatch");
  const double n = static_cast<double>(X.rows());
  const Eigen::Index d = X.cols();
  const Eigen::VectorXd col_sq = X.colwise().squaredNorm().transpose() / n;

  LassoResult out;
  out.weights = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd residual = y;
  out.objective_trace.push_back(
      residual.squaredNorm() / (2.0 * n));

  // w = 0 is optimal iff lambda >= max_j |x_j^T y| / N. Checked up front with
  // a relative slack of a few ulps so that a caller's lambda_max, computed
  // with a differently rounded product, still yields exact zeros.
  const double lambda_max = (X.transpose() * y).cwiseAbs().maxCoeff() / n;
  if (params.lambda >= lambda_max * (1.0 - 1e-14)) {
    out.converged = true;
    return out;
  }

  for (std::size_t sweep = 0; sweep < params.max_iter; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double old = out.weights[j];
      const double rho = X.col(j).dot(residual) / n + col_sq[j] * old;
      const double updated = SoftThreshold(rho, params.lambda) / col_sq[j];
      const double delta = updated - old;
      if (delta != 0.0) {
        residual.noalias() -= delta * X.col(j);
        out.weights[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    out.sweeps = sweep + 1;
    out.objective_trace.push_back(residual.squaredNorm() / (2.0 * n) +
                                  params.lambda * out.weights.lpNorm<1>());
    if (max_change < params.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

inline LassoResult LassoCd(const Dataset& ds, const LassoParams& params) {
  internal::RequireScaled(ds);
  return LassoCdRaw(ds.X, ds.y, params);
}

struct LassoTopKResult {
  IndexSet indices;
  // Fewer than k coefficients were nonzero; the set was padded with the
  // smallest-index zero-coefficient features.
  bool padded = false;
  LassoResult fit;
};

// k coefficients of largest magnitude, ties by ascending index.
inline LassoTopKResult LassoTopK(const Dataset& ds, const LassoParams& params,
                                 std::size_t k) {
  DPSIS_REQUIRE(k >= 1 && k <= ds.features(), "k must lie in [1, d]");
  LassoTopKResult out;
  out.fit = LassoCd(ds, params);
  std::vector<double> mag(static_cast<std::size_t>(out.fit.weights.size()));
  std::size_t nonzero = 0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    mag[j] = std::abs(out.fit.weights[static_cast<Eigen::Index>(j)]);
    if (mag[j] > params.support_threshold) ++nonzero;
  }
  out.indices = TopKIndices(mag, k);
  out.padded = nonzero < k;
  return out;
}

// ---------------------------------------------------------------------------
// Two-stage (subsample-and-aggregate) selection

struct TwoStageParams {
  std::size_t k = 5;
  // 0 selects floor(sqrt(N)).
  std::size_t block_count = 0;
  LassoParams lasso;
  bool private_selection = false;
  double epsilon = 1.0;
  double gamma = 0.5;
};

inline std::size_t DefaultBlockCount(std::size_t rows) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(rows)))));
}

// Contiguous [begin, end) row ranges; sizes differ by at most one, the first
// N mod B blocks being the larger ones.
inline std::vector<std::pair<std::size_t, std::size_t>> BlockRanges(
    std::size_t rows, std::size_t block_count) {
  DPSIS_REQUIRE(block_count >= 1, "block_count must be at least 1");
  DPSIS_REQUIRE(rows >= block_count, "need at least one row per block");
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  const std::size_t base = rows / block_count;
  const std::size_t extra = rows % block_count;
  std::size_t begin = 0;
  for (std::size_t b = 0; b < block_count; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + len);
    begin += len;
  }
  return ranges;
}

// s_j = number of blocks whose LASSO support contains feature j. One row
// lives in exactly one block, so each s_j moves by at most 1 when a row
// changes.
inline std::vector<double> SupportCounts(const Dataset& ds,
                                         std::size_t block_count,
                                         const LassoParams& lasso) {
  internal::RequireScaled(ds);
  if (block_count == 0) block_count = DefaultBlockCount(ds.rows());
  const auto ranges = BlockRanges(ds.rows(), block_count);
  for (const auto& [b, e] : ranges)
    DPSIS_REQUIRE(e - b >= 2,
                  "two-stage blocks need at least 2 rows; use a larger "
                  "dataset or fewer blocks");
  std::vector<double> counts(ds.features(), 0.0);
  for (const auto& [b, e] : ranges) {
    const auto len = static_cast<Eigen::Index>(e - b);
    const auto start = static_cast<Eigen::Index>(b);
    const LassoResult fit =
        LassoCdRaw(ds.X.middleRows(start, len), ds.y.segment(start, len), lasso);
    for (std::size_t j = 0; j < counts.size(); ++j)
      if (std::abs(fit.weights[static_cast<Eigen::Index>(j)]) > lasso.support_threshold)
        counts[j] += 1.0;
  }
  return counts;
}

// Second half of the two-stage selector: top-k of the count vector, either
// exactly or through the Lipschitz mechanism with sensitivity 1.
template <class URBG>
IndexSet SelectFromCounts(const std::vector<double>& counts,
                          const TwoStageParams& params, URBG& rng) {
  DPSIS_REQUIRE(params.k >= 1 && params.k <= counts.size(), "k must lie in [1, d]");
  if (!params.private_selection) return TopKIndices(counts, params.k);
  const ScoreVector scores(counts, 1.0);
  return LipschitzTopK(scores, MechanismParams{params.k, params.epsilon, params.gamma},
                       rng)
      .indices;
}

template <class URBG>
IndexSet TwoStageSelect(const Dataset& ds, const TwoStageParams& params,
                        URBG& rng) {
  DPSIS_REQUIRE(params.k >= 1, "k must be at least 1");
  return SelectFromCounts(SupportCounts(ds, params.block_count, params.lasso),
                          params, rng);
}

inline IndexSet TwoStageSelect(const Dataset& ds, const TwoStageParams& params,
                               uint64_t seed) {
  Rng rng(seed);
  return TwoStageSelect(ds, params, rng);
}

}  // namespace dpsis

#endif  // DPSIS_SELECTORS_HPP_
