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

// Exhaustive reference implementations of the canonical loss and of the
// Lipschitz mechanism. They enumerate all C(d, k) subsets and exist to check
// the utility-class implementation on small instances.

#ifndef DPSIS_BRUTE_FORCE_HPP_
#define DPSIS_BRUTE_FORCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "dpsis/lipschitz_topk.hpp"

namespace dpsis {

// Calls visit(span) for every k-subset of {0, ..., d-1} in lexicographic
// order.
template <class Visitor>
void ForEachSubset(std::size_t d, std::size_t k, Visitor&& visit) {
  if (k > d) return;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), std::size_t{0});
  while (true) {
    visit(std::span<const std::size_t>(c));
    std::size_t i = k;
    while (i > 0 && c[i - 1] == d - k + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

inline double BinomialCount(std::size_t n, std::size_t r) {
  if (r > n) return 0.0;
  r = std::min(r, n - r);
  double c = 1.0;
  for (std::size_t i = 1; i <= r; ++i)
    c = c * static_cast<double>(n - r + i) / static_cast<double>(i);
  return std::round(c);
}

namespace internal {

inline void CheckSubset(std::span<const std::size_t> y, std::size_t d) {
  DPSIS_REQUIRE(!y.empty() && y.size() < d, "subset size must lie in [1, d - 1]");
  std::vector<char> seen(d, 0);
  for (std::size_t i : y) {
    DPSIS_REQUIRE(i < d, "subset index out of range");
    DPSIS_REQUIRE(!seen[i], "subset contains a duplicate index");
    seen[i] = 1;
  }
}

}  // namespace internal

// max(0, (best excluded score - worst included score) / 2), computed
// directly from the values without ranks.
inline double BruteForceLossOracle(std::span<const std::size_t> y,
                                   const ScoreVector& x) {
  const auto& v = x.normalized();
  internal::CheckSubset(y, v.size());
  std::vector<char> in_y(v.size(), 0);
  double min_in = std::numeric_limits<double>::infinity();
  for (std::size_t i : y) {
    in_y[i] = 1;
    min_in = std::min(min_in, v[i]);
  }
  double max_out = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!in_y[i]) max_out = std::max(max_out, v[i]);
  return std::max(0.0, 0.5 * (max_out - min_in));
}

// Value-based form of the generalized loss: (1 - gamma) * best excluded -
// gamma * worst included, except for the (tie-broken) true top-k set whose
// class (k - 1, k) is pinned to (1 - 2 gamma) x_[k].
inline double GeneralizedLossOracle(std::span<const std::size_t> y,
                                    const ScoreVector& x, double gamma) {
  const auto& v = x.normalized();
  internal::CheckSubset(y, v.size());
  IndexSet sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted == x.TopK(y.size()))
    return (1.0 - 2.0 * gamma) * x.OrderStat(y.size());
  std::vector<char> in_y(v.size(), 0);
  double min_in = std::numeric_limits<double>::infinity();
  for (std::size_t i : y) {
    in_y[i] = 1;
    min_in = std::min(min_in, v[i]);
  }
  double max_out = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!in_y[i]) max_out = std::max(max_out, v[i]);
  return (1.0 - gamma) * max_out - gamma * min_in;
}

inline constexpr double kBruteForceMaxSubsets = 1e5;

// Lipschitz mechanism by enumeration: each subset gets
// -(epsilon / 2) LOSS + (-log(1 - U)) with its own uniform draw, in
// lexicographic subset order.
template <class URBG>
SelectionResult BruteForceMechanism(const ScoreVector& x,
                                    const MechanismParams& params, URBG& rng) {
  const std::size_t d = x.size();
  params.Validate(d);
  DPSIS_REQUIRE(BinomialCount(d, params.k) <= kBruteForceMaxSubsets,
                "brute-force domain too large (more than 1e5 subsets)");
  const double scale = params.epsilon / (2.0 * MechanismParams::loss_sensitivity());
  double best = -std::numeric_limits<double>::infinity();
  IndexSet winner;
  ForEachSubset(d, params.k, [&](std::span<const std::size_t> y) {
    const double loss = params.gamma == 0.5
                            ? BruteForceLossOracle(y, x)
                            : GeneralizedLossOracle(y, x, params.gamma);
    const double value = -scale * loss - std::log1p(-OpenUniform(rng));
    if (value > best) {
      best = value;
      winner.assign(y.begin(), y.end());
    }
  });
  SelectionResult result;
  const auto [h, t] = ClassifySubset(winner, x);
  result.indices = std::move(winner);
  result.head = h;
  result.tail = t;
  result.value = best;
  result.params = params;
  return result;
}

}  // namespace dpsis

#endif  // DPSIS_BRUTE_FORCE_HPP_
