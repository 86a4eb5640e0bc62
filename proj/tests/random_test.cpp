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
#include "pcr/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "stat_oracles.hpp"

namespace pcr {
namespace {

constexpr int kDraws = 100000;

template <typename F>
std::vector<double> Draws(uint64_t seed, int n, F f) {
  Rng rng(seed);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs.push_back(f(rng));
  return xs;
}

TEST(UniformOpenTest, NeverHitsTheEndpoints) {
  struct Fixed {
    using result_type = uint64_t;
    uint64_t value;
    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~uint64_t{0}; }
    uint64_t operator()() { return value; }
  };
  Fixed lo{0};
  Fixed hi{~uint64_t{0}};
  EXPECT_GT(UniformOpen(lo), 0.0);
  EXPECT_LT(UniformOpen(hi), 1.0);
  // Gumbel stays finite at both extremes.
  EXPECT_TRUE(std::isfinite(SampleGumbel(1.0, lo)));
  EXPECT_TRUE(std::isfinite(SampleGumbel(1.0, hi)));
}

TEST(UniformIndexTest, InRangeAndRejectsEmpty) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(UniformIndex(rng, 7), 7u);
  EXPECT_THROW(UniformIndex(rng, 0), InvalidArgument);
}

TEST(GumbelTest, FixedPointAtInverseE) {
  EXPECT_DOUBLE_EQ(GumbelFromUniform(3.0, std::exp(-1.0)), 0.0);
  EXPECT_THROW(GumbelFromUniform(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(GumbelFromUniform(1.0, 1.0), InvalidArgument);
}

TEST(GumbelTest, RejectsNonPositiveScale) {
  Rng rng(1);
  EXPECT_THROW(SampleGumbel(0.0, rng), InvalidArgument);
  EXPECT_THROW(SampleGumbel(-1.0, rng), InvalidArgument);
}

TEST(GumbelTest, MeanIsEulerGamma) {
  auto xs = Draws(2024, kDraws, [](Rng& r) { return SampleGumbel(1.0, r); });
  EXPECT_NEAR(testing::Mean(xs), std::numbers::egamma, 0.02);
}

TEST(GumbelTest, ScaleEquivariance) {
  auto one = Draws(99, 1000, [](Rng& r) { return SampleGumbel(1.0, r); });
  auto two = Draws(99, 1000, [](Rng& r) { return SampleGumbel(2.0, r); });
  for (std::size_t i = 0; i < one.size(); ++i) ASSERT_EQ(two[i], 2.0 * one[i]);
}

TEST(GumbelTest, KolmogorovSmirnov) {
  for (uint64_t seed : {1u, 2u, 3u}) {
    auto xs = Draws(seed, kDraws, [](Rng& r) { return SampleGumbel(1.0, r); });
    double d = testing::KsStatistic(xs, [](double x) { return testing::GumbelCdf(x, 1.0); });
    EXPECT_LT(d, testing::KsCritical(xs.size(), 0.01)) << "seed " << seed;
  }
  auto xs = Draws(4, kDraws, [](Rng& r) { return SampleGumbel(2.5, r); });
  double d = testing::KsStatistic(xs, [](double x) { return testing::GumbelCdf(x, 2.5); });
  EXPECT_LT(d, testing::KsCritical(xs.size(), 0.01));
}

TEST(GaussianTest, VarianceNearOne) {
  auto xs = Draws(7, kDraws, [](Rng& r) { return SampleGaussian(1.0, r); });
  EXPECT_NEAR(testing::Variance(xs), 1.0, 0.02);
  EXPECT_NEAR(testing::Mean(xs), 0.0, 0.02);
}

TEST(GaussianTest, ScaleProperty) {
  auto one = Draws(5, 1000, [](Rng& r) { return SampleGaussian(1.0, r); });
  auto three = Draws(5, 1000, [](Rng& r) { return SampleGaussian(3.0, r); });
  for (std::size_t i = 0; i < one.size(); ++i) ASSERT_EQ(three[i], 3.0 * one[i]);
}

TEST(GaussianTest, KolmogorovSmirnov) {
  auto xs = Draws(11, kDraws, [](Rng& r) { return SampleGaussian(1.0, r); });
  double d = testing::KsStatistic(xs, testing::StandardNormalCdf);
  EXPECT_LT(d, testing::KsCritical(xs.size(), 0.01));
}

TEST(GaussianTest, RejectsNonPositiveSigma) {
  Rng rng(1);
  EXPECT_THROW(SampleGaussian(0.0, rng), InvalidArgument);
}

TEST(RngTest, SameSeedSameStream) {
  auto a = Draws(123, 500, [](Rng& r) { return SampleGaussian(1.0, r) + SampleGumbel(1.0, r); });
  auto b = Draws(123, 500, [](Rng& r) { return SampleGaussian(1.0, r) + SampleGumbel(1.0, r); });
  auto c = Draws(124, 500, [](Rng& r) { return SampleGaussian(1.0, r) + SampleGumbel(1.0, r); });
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

}  // namespace
}  // namespace pcr
