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

#ifndef DPSIS_RANDOM_HPP_
#define DPSIS_RANDOM_HPP_

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace dpsis {

// Engine used for every random stream in the library. Algorithms are
// templated on the URBG, so any 64-bit engine can be substituted.
using Rng = std::mt19937_64;

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from a master seed and an ordered list of stream
// coordinates (trial index, method id, ...). Each coordinate is folded in
// with a full Mix64 round, so nearby coordinates give unrelated seeds and
// the result does not depend on the order in which streams are consumed.
constexpr uint64_t DeriveSeed(uint64_t master,
                              std::initializer_list<uint64_t> coords) {
  uint64_t h = Mix64(master);
  for (uint64_t c : coords) h = Mix64(h ^ Mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

inline uint64_t DoubleBits(double v) { return std::bit_cast<uint64_t>(v); }

// Uniform on the open interval (0, 1) with 53 bits of resolution. Never
// returns 0 or 1, so log(U) is always finite.
template <class URBG>
double OpenUniform(URBG& rng) {
  static_assert(URBG::max() - URBG::min() == ~uint64_t{0},
                "OpenUniform expects a 64-bit engine");
  const uint64_t bits = (rng() - URBG::min()) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

template <class URBG>
double StandardNormal(URBG& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// Uniform integer in [0, n). Lemire's multiply-shift with rejection; avoids
// the implementation-defined algorithm behind std::uniform_int_distribution.
template <class URBG>
uint64_t UniformIndex(URBG& rng, uint64_t n) {
  using u128 = unsigned __int128;
  uint64_t x = rng() - URBG::min();
  u128 m = static_cast<u128>(x) * n;
  auto low = static_cast<uint64_t>(m);
  if (low < n) {
    const uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = rng() - URBG::min();
      m = static_cast<u128>(x) * n;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

}  // namespace dpsis

#endif  // DPSIS_RANDOM_HPP_
