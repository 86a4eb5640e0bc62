// Copyright 2026 The PCR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Seeded noise samplers. Every sampler consumes a fixed number of 64-bit words
// per draw, so a seed and a call sequence determine the output exactly.
// Not a cryptographic source.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>

#include "pcr/common.hpp"

namespace pcr {

template <typename G>
concept BitSource = std::uniform_random_bit_generator<G> &&
                    std::same_as<typename G::result_type, uint64_t>;

class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return engine_(); }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

// Uniform on the open interval (0, 1): 52 random bits, offset by half a step,
// so both endpoints are exactly representable distances away.
template <BitSource G>
double UniformOpen(G& gen) {
  return (static_cast<double>(gen() >> 12) + 0.5) * 0x1.0p-52;
}

// Uniform integer in [0, n) by rejection.
template <BitSource G>
uint64_t UniformIndex(G& gen, uint64_t n) {
  Require(n > 0, "UniformIndex: empty range");
  const uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
  for (;;) {
    uint64_t x = gen();
    if (x < limit) return x % n;
  }
}

// Inverse CDF of Gumbel(0, beta) evaluated at u in (0, 1).
inline double GumbelFromUniform(double beta, double u) {
  Require(beta > 0, "gumbel scale must be positive");
  Require(u > 0 && u < 1, "gumbel uniform must lie in (0, 1)");
  return -beta * std::log(-std::log(u));
}

template <BitSource G>
double SampleGumbel(double beta, G& gen) {
  Require(beta > 0, "gumbel scale must be positive");
  return GumbelFromUniform(beta, UniformOpen(gen));
}

// Box-Muller, two uniforms per draw, the sine branch is discarded.
template <BitSource G>
double SampleStandardNormal(G& gen) {
  double u1 = UniformOpen(gen);
  double u2 = UniformOpen(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <BitSource G>
double SampleGaussian(double sigma, G& gen) {
  Require(sigma > 0, "gaussian sigma must be positive");
  return sigma * SampleStandardNormal(gen);
}

}  // namespace pcr
