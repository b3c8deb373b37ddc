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

// Canonical Lipschitz mechanism for epsilon-DP top-k selection.
//
// Every k-subset y of the d score indices receives the value
//
//     -(epsilon / 2) * LOSS(y | x) + Exp(1) noise
//
// and the mechanism returns the argmax. LOSS is the generalized canonical
// loss (1 - gamma) x_[h+1] - gamma x_[t], which is constant on the
// "utility classes" C_{h,t}: all subsets that contain the h best indices
// (head), the rank-t index (tail) and k - h - 1 indices ranked strictly
// between h + 1 and t (body). Rank h + 1 itself is excluded from the body,
// otherwise the subset would have a longer head and belong to another class.
// There are k(d - k) + 1 classes, so it suffices to draw the maximal noise of
// each class,
//
//     max of m iid Exp(1)  ~  -log(1 - U^(1/m)),   m = C(t - h - 2, k - h - 1),
//
// pick the best class, and return a uniform member of it. Ranks below are
// 1-based to match the order statistics x_[1] >= ... >= x_[d]; feature
// indices are 0-based.

#ifndef DPSIS_LIPSCHITZ_TOPK_HPP_
#define DPSIS_LIPSCHITZ_TOPK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "dpsis/dataset.hpp"
#include "dpsis/errors.hpp"
#include "dpsis/random.hpp"

namespace dpsis {

// Scores normalized by their per-component sensitivity, with the descending
// rank order. Ties are broken by ascending index.
class ScoreVector {
 public:
  ScoreVector() = default;

  ScoreVector(std::vector<double> raw_scores, double sensitivity)
      : raw_(std::move(raw_scores)), sensitivity_(sensitivity) {
    DPSIS_REQUIRE(sensitivity_ > 0.0 && std::isfinite(sensitivity_),
                  "score sensitivity must be positive and finite");
    normalized_.resize(raw_.size());
    for (std::size_t i = 0; i < raw_.size(); ++i) {
      DPSIS_REQUIRE(std::isfinite(raw_[i]), "scores must be finite");
      normalized_[i] = raw_[i] / sensitivity_;
    }
    order_.resize(raw_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [this](std::size_t a, std::size_t b) {
                       return normalized_[a] > normalized_[b];
                     });
    rank_of_.resize(raw_.size());
    for (std::size_t r = 0; r < order_.size(); ++r) rank_of_[order_[r]] = r + 1;
  }

  // Already-normalized scores (sensitivity 1).
  static ScoreVector Normalized(std::vector<double> x) {
    return ScoreVector(std::move(x), 1.0);
  }

  std::size_t size() const { return raw_.size(); }
  const std::vector<double>& raw_scores() const { return raw_; }
  double sensitivity() const { return sensitivity_; }
  const std::vector<double>& normalized() const { return normalized_; }

  // order()[r - 1] is the index holding rank r.
  const std::vector<std::size_t>& order() const { return order_; }

  // x_[rank], rank in [1, d].
  double OrderStat(std::size_t rank) const { return normalized_[order_[rank - 1]]; }

  // Rank (1-based) of feature `index`.
  std::size_t RankOf(std::size_t index) const { return rank_of_[index]; }

  // Indices holding ranks 1..k, sorted ascending.
  IndexSet TopK(std::size_t k) const {
    IndexSet top(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(top.begin(), top.end());
    return top;
  }

 private:
  std::vector<double> raw_;
  double sensitivity_ = 1.0;
  std::vector<double> normalized_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_of_;
};

struct MechanismParams {
  std::size_t k = 1;
  double epsilon = 1.0;
  double gamma = 0.5;

  // Budget weight on the best excluded score.
  double epsilon1() const { return (1.0 - gamma) * epsilon; }
  // Budget weight on the worst included score.
  double epsilon2() const { return gamma * epsilon; }
  static constexpr double loss_sensitivity() { return 1.0; }

  void Validate(std::size_t d) const {
    DPSIS_REQUIRE(d >= 2, "top-k selection needs at least two scores");
    DPSIS_REQUIRE(k >= 1 && k <= d - 1, "k must lie in [1, d - 1]");
    DPSIS_REQUIRE(epsilon > 0.0 && std::isfinite(epsilon),
                  "epsilon must be positive and finite");
    DPSIS_REQUIRE(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
  }
};

// One utility class C_{h,t}. `head` is h in [0, k - 1]; `tail` is the rank t
// in [k, d]. `size` is C(t - h - 2, k - h - 1) as a floating-point count
// (1 for the class (k - 1, k) holding only the true top-k).
struct UtilityClass {
  std::size_t head = 0;
  std::size_t tail = 0;
  double size = 1.0;
  double utility = 0.0;
  double noise = 0.0;

  friend bool operator==(const UtilityClass&, const UtilityClass&) = default;
};

struct SelectionResult {
  IndexSet indices;
  std::size_t head = 0;  // winning h
  std::size_t tail = 0;  // winning t
  double value = 0.0;
  MechanismParams params;
  uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Canonical loss

// (h, t) of a k-subset: h is the number of leading ranks 1, 2, ... contained
// in y, capped at k - 1; t is the worst rank in y, floored at k.
inline std::pair<std::size_t, std::size_t> ClassifySubset(
    std::span<const std::size_t> y, const ScoreVector& x) {
  const std::size_t d = x.size();
  const std::size_t k = y.size();
  DPSIS_REQUIRE(k >= 1 && k + 1 <= d, "subset size must lie in [1, d - 1]");
  std::vector<char> in_y(d + 1, 0);  // by rank
  for (std::size_t i : y) {
    DPSIS_REQUIRE(i < d, "subset index out of range");
    const std::size_t r = x.RankOf(i);
    DPSIS_REQUIRE(!in_y[r], "subset contains a duplicate index");
    in_y[r] = 1;
  }
  std::size_t h = 0;
  while (h < k - 1 && in_y[h + 1]) ++h;
  std::size_t t = d;
  while (!in_y[t]) --t;
  return {h, std::max(t, k)};
}

// Generalized canonical loss (1 - gamma) x_[h+1] - gamma x_[t]. For
// gamma = 1/2 this is min ||x - v||_inf over v whose top-k index set is y.
inline double CanonicalLoss(std::span<const std::size_t> y,
                            const ScoreVector& x, double gamma = 0.5) {
  DPSIS_REQUIRE(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  const auto [h, t] = ClassifySubset(y, x);
  return (1.0 - gamma) * x.OrderStat(h + 1) - gamma * x.OrderStat(t);
}

// ---------------------------------------------------------------------------
// Utility classes

// Visits every utility class in the mechanism's iteration order: first
// (k - 1, k), then for t = k + 1..d the heads h = k - 1 down to 0. The class
// size is maintained incrementally with
//   C(t - h - 2, k - h - 1) = C(t - h - 3, k - h - 2) * (t - h - 2) / (k - h - 1).
// visit(h, t, m) is called once per class.
template <class Visitor>
void ForEachUtilityClass(std::size_t d, std::size_t k, Visitor&& visit) {
  DPSIS_REQUIRE(k >= 1 && k + 1 <= d, "need 1 <= k <= d - 1");
  visit(k - 1, k, 1.0);
  for (std::size_t t = k + 1; t <= d; ++t) {
    double m = 1.0;
    for (std::size_t h = k; h-- > 0;) {
      if (h < k - 1)
        m *= static_cast<double>(t - h - 2) / static_cast<double>(k - h - 1);
      visit(h, t, m);
    }
  }
}

inline std::size_t UtilityClassCount(std::size_t d, std::size_t k) {
  return k * (d - k) + 1;
}

inline std::vector<UtilityClass> EnumerateUtilityClasses(std::size_t d,
                                                         std::size_t k) {
  std::vector<UtilityClass> classes;
  classes.reserve(UtilityClassCount(d, k));
  ForEachUtilityClass(d, k, [&](std::size_t h, std::size_t t, double m) {
    classes.push_back({h, t, m, 0.0, 0.0});
  });
  return classes;
}

// ---------------------------------------------------------------------------
// Maximal exponential noise

// Below this exponent 1 - u^y is replaced by its second-order expansion in y.
inline constexpr double kTaylorExponentCutoff = 1e-8;

// -log(1 - u^(1/m)): the standard-exponential quantile of u^(1/m), i.e. a
// draw of the maximum of m iid Exp(1) variables when u ~ U(0, 1).
inline double MaxNoiseFromUniform(double u, double m) {
  const double y = 1.0 / m;
  const double w = y * std::log(u);  // log(u^y) <= 0
  double one_minus = 0.0;
  if (y <= kTaylorExponentCutoff) {
    // 1 - u^y = -w - w^2/2 - O(w^3)
    one_minus = -w - 0.5 * w * w;
  } else {
    one_minus = -std::expm1(w);
  }
  return -std::log(one_minus);
}

template <class URBG>
double SampleMaxNoise(double m, URBG& rng) {
  DPSIS_REQUIRE(m >= 1.0 && std::isfinite(m),
                "class size must be finite and at least 1");
  return MaxNoiseFromUniform(OpenUniform(rng), m);
}

inline constexpr double kEulerMascheroni = 0.57721566490153286060651209;

// Harmonic number H_m = 1 + 1/2 + ... + 1/m, the mean of the maximal noise
// of a class of size m. Exact sum for integral m <= 1e6; otherwise the
// asymptotic expansion, after shifting small non-integral m upward with
// H_m = H_{m+n} - sum_{i=1..n} 1/(m+i).
inline double Harmonic(double m) {
  DPSIS_REQUIRE(m >= 1.0 && std::isfinite(m), "harmonic needs finite m >= 1");
  constexpr double kExactLimit = 1e6;
  if (m <= kExactLimit && m == std::floor(m)) {
    double sum = 0.0;
    for (auto i = static_cast<long>(m); i >= 1; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
  }
  double shift = 0.0;
  double x = m;
  while (x < 1e3) {
    x += 1.0;
    shift += 1.0 / x;
  }
  const double inv = 1.0 / x;
  return std::log(x) + kEulerMascheroni + 0.5 * inv - inv * inv / 12.0 - shift;
}

// ---------------------------------------------------------------------------
// Mechanism

namespace internal {

// Uniform member of C_{head,tail}: ranks 1..head, `k - head - 1` distinct
// ranks drawn from head+2..tail-1, and rank `tail`.
template <class URBG>
IndexSet SampleClassMember(const ScoreVector& x, std::size_t k,
                           std::size_t head, std::size_t tail, URBG& rng) {
  const auto& order = x.order();
  IndexSet out;
  out.reserve(k);
  for (std::size_t r = 1; r <= head; ++r) out.push_back(order[r - 1]);
  const std::size_t body = k - head - 1;
  if (body > 0) {
    // Candidate ranks head+2 .. tail-1 (head+1 is the best excluded rank).
    std::vector<std::size_t> pool;
    pool.reserve(tail - head - 2);
    for (std::size_t r = head + 2; r <= tail - 1; ++r) pool.push_back(r);
    for (std::size_t i = 0; i < body; ++i) {
      const std::size_t j = i + UniformIndex(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
      out.push_back(order[pool[i] - 1]);
    }
  }
  out.push_back(order[tail - 1]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace internal

// Runs the canonical Lipschitz mechanism in O(d log d + dk) time. Noise is
// drawn once per class in ForEachUtilityClass order, then the body of the
// winning class is drawn, so equal seeds give equal outputs and the noise
// sequence does not depend on the score values.
template <class URBG>
SelectionResult LipschitzTopK(const ScoreVector& x, const MechanismParams& params,
                              URBG& rng) {
  const std::size_t d = x.size();
  params.Validate(d);
  const std::size_t k = params.k;
  const double half_e1 = 0.5 * params.epsilon1() / MechanismParams::loss_sensitivity();
  const double half_e2 = 0.5 * params.epsilon2() / MechanismParams::loss_sensitivity();

  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_h = k - 1;
  std::size_t best_t = k;
  ForEachUtilityClass(d, k, [&](std::size_t h, std::size_t t, double m) {
    // For (k-1, k) this is (e2 - e1)/2 * x_[k].
    const double utility = half_e2 * x.OrderStat(t) - half_e1 * x.OrderStat(h + 1);
    const double value = utility + SampleMaxNoise(m, rng);
    if (value > best) {
      best = value;
      best_h = h;
      best_t = t;
    }
  });

  SelectionResult result;
  result.indices = internal::SampleClassMember(x, k, best_h, best_t, rng);
  result.head = best_h;
  result.tail = best_t;
  result.value = best;
  result.params = params;
  return result;
}

// Seeded entry point; the seed is recorded in the result for replay.
inline SelectionResult LipschitzTopK(const ScoreVector& x,
                                     const MechanismParams& params,
                                     uint64_t seed) {
  Rng rng(seed);
  SelectionResult r = LipschitzTopK(x, params, rng);
  r.seed = seed;
  return r;
}

}  // namespace dpsis

#endif  // DPSIS_LIPSCHITZ_TOPK_HPP_
