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

#ifndef DPSIS_METRICS_HPP_
#define DPSIS_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <unordered_set>
#include <vector>

#include "dpsis/dataset.hpp"
#include "dpsis/errors.hpp"

namespace dpsis {

// Fraction of the reference set recovered: |selected ∩ reference| / k.
inline double TopKAccuracy(const IndexSet& selected, const IndexSet& reference) {
  DPSIS_REQUIRE(!selected.empty() && selected.size() == reference.size(),
                "selected and reference sets must have the same size k >= 1");
  const std::unordered_set<std::size_t> ref(reference.begin(), reference.end());
  std::size_t hits = 0;
  for (std::size_t i : selected) hits += ref.count(i);
  return static_cast<double>(hits) / static_cast<double>(reference.size());
}

// Reference features in descending order of importance.
struct RankedReference {
  std::vector<std::size_t> ranked_indices;
  std::size_t k = 0;

  void Validate() const {
    DPSIS_REQUIRE(k >= 1 && ranked_indices.size() >= k,
                  "ranked reference must hold at least k indices");
    std::unordered_set<std::size_t> seen;
    for (std::size_t i : ranked_indices)
      DPSIS_REQUIRE(seen.insert(i).second, "ranked reference has duplicates");
  }
};

struct TggFlags {
  bool top = false;
  bool great = false;
  bool good = false;
};

// Pool sizes of the order-statistic tiers. The required head is rounded up
// and the allowed pool down.
struct TggPools {
  std::size_t great_head, great_pool, good_head, good_pool;

  static TggPools For(std::size_t k) {
    return {(k + 9) / 10, (11 * k) / 10, (k + 99) / 100, (3 * k) / 2};
  }
};

namespace internal {

// selected ⊇ ranked[0..head) and selected ⊆ ranked[0..pool).
inline bool Nested(const std::unordered_set<std::size_t>& selected,
                   const std::vector<std::size_t>& ranked, std::size_t head,
                   std::size_t pool) {
  for (std::size_t r = 0; r < head; ++r)
    if (!selected.count(ranked[r])) return false;
  const std::unordered_set<std::size_t> allowed(
      ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(pool));
  for (std::size_t i : selected)
    if (!allowed.count(i)) return false;
  return true;
}

}  // namespace internal

// TOP: exactly the reference top-k. GREAT: contains the top ceil(k/10) and
// lies within the top floor(11k/10). GOOD: contains the top ceil(k/100) and
// lies within the top floor(3k/2).
inline TggFlags ComputeTggFlags(const IndexSet& selected,
                                const RankedReference& ref) {
  ref.Validate();
  DPSIS_REQUIRE(selected.size() == ref.k, "selected set must have size k");
  const TggPools pools = TggPools::For(ref.k);
  DPSIS_REQUIRE(ref.ranked_indices.size() >= pools.good_pool,
                "ranked reference shorter than floor(3k/2)");
  const std::unordered_set<std::size_t> sel(selected.begin(), selected.end());
  DPSIS_REQUIRE(sel.size() == selected.size(), "selected set has duplicates");
  TggFlags f;
  f.top = internal::Nested(sel, ref.ranked_indices, ref.k, ref.k);
  f.great = internal::Nested(sel, ref.ranked_indices, pools.great_head,
                             pools.great_pool);
  f.good = internal::Nested(sel, ref.ranked_indices, pools.good_head,
                            pools.good_pool);
  return f;
}

// ---------------------------------------------------------------------------
// Exact-recovery guarantee

struct BoundInput {
  std::size_t d = 2;
  std::size_t k = 1;
  double xi = 0.0;     // gap between the k-th and (k+1)-th scores
  double gamma = 0.5;  // in (0, 1]
  double epsilon = 1.0;

  void Validate() const {
    DPSIS_REQUIRE(k >= 1 && k < d, "need 1 <= k < d");
    DPSIS_REQUIRE(xi >= 0.0, "xi must be nonnegative");
    DPSIS_REQUIRE(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
    DPSIS_REQUIRE(epsilon > 0.0, "epsilon must be positive");
  }
};

inline double LogBinomial(double n, double r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

// log c_{d,k} with c_{d,k} = C(d, k) k^k / d^k.
inline double LogCdk(std::size_t d, std::size_t k) {
  const double dd = static_cast<double>(d);
  const double kk = static_cast<double>(k);
  return LogBinomial(dd, kk) + kk * std::log(kk) - kk * std::log(dd);
}

// Lower bound on the probability that DP-SIS returns exactly the true top-k:
//   max(0, 1 - exp(k log(d/k) + log c_{d,k} - xi gamma epsilon / 2)).
inline double RecoveryBound(const BoundInput& b) {
  b.Validate();
  const double kk = static_cast<double>(b.k);
  const double exponent = kk * std::log(static_cast<double>(b.d) / kk) +
                          LogCdk(b.d, b.k) - 0.5 * b.xi * b.gamma * b.epsilon;
  return std::clamp(1.0 - std::exp(exponent), 0.0, 1.0);
}

}  // namespace dpsis

#endif  // DPSIS_METRICS_HPP_
