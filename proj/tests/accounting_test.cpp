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
#include "pcr/accounting.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

namespace pcr {
namespace {

TEST(PrivacyFilterTest, NewFilterHasZeroSpend) {
  PrivacyFilter f({1.0, 1e-6});
  EXPECT_EQ(f.rho_spent(), 0.0);
  EXPECT_EQ(f.delta_spent(), 0.0);
  EXPECT_TRUE(f.log().empty());
}

TEST(PrivacyFilterTest, ZeroBudgetRejectsPositiveCharges) {
  PrivacyFilter f({0.0, 0.0});
  EXPECT_FALSE(f.TryCharge(1e-12, 0, "x"));
  EXPECT_FALSE(f.TryCharge(0, 1e-12, "x"));
  EXPECT_EQ(f.rho_spent(), 0.0);
}

TEST(PrivacyFilterTest, InvalidBudgets) {
  EXPECT_THROW(PrivacyFilter({1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(PrivacyFilter({-1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(PrivacyFilter({1.0, -1e-9}), InvalidArgument);
  PrivacyFilter f({1.0, 0.5});
  EXPECT_THROW(f.TryCharge(-1, 0, "neg"), InvalidArgument);
}

TEST(PrivacyFilterTest, ExactExhaustionThenReject) {
  PrivacyFilter f({1.0, 1e-6});
  EXPECT_TRUE(f.TryCharge(0.5, 0, "a"));
  EXPECT_TRUE(f.TryCharge(0.5, 0, "b"));
  EXPECT_EQ(f.rho_spent(), 1.0);
  EXPECT_FALSE(f.TryCharge(1e-9, 0, "c"));
  EXPECT_EQ(f.rho_spent(), 1.0);
  ASSERT_EQ(f.log().size(), 3u);
  EXPECT_FALSE(f.log()[2].accepted);
}

TEST(PrivacyFilterTest, RejectsOnDelta) {
  PrivacyFilter f({1.0, 1e-6});
  EXPECT_TRUE(f.TryCharge(0.1, 1e-6, "a"));
  EXPECT_FALSE(f.TryCharge(0.1, 1e-11, "b"));
  EXPECT_DOUBLE_EQ(f.rho_spent(), 0.1);
  EXPECT_EQ(f.delta_spent(), 1e-6);
}

TEST(PrivacyFilterTest, FuzzNeverExceedsBudget) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int run = 0; run < 500; ++run) {
    PrivacyBudget budget{unit(gen) * 2, unit(gen) * 1e-3};
    PrivacyFilter f(budget);
    double rho_sum = 0;
    double delta_sum = 0;
    for (int i = 0; i < 200; ++i) {
      double rho = unit(gen) * budget.rho / 5;
      double delta = unit(gen) < 0.3 ? 0.0 : unit(gen) * budget.delta / 5;
      double before_rho = f.rho_spent();
      double before_delta = f.delta_spent();
      bool ok = f.TryCharge(rho, delta, "fuzz");
      if (ok) {
        rho_sum += rho;
        delta_sum += delta;
      } else {
        ASSERT_EQ(f.rho_spent(), before_rho);
        ASSERT_EQ(f.delta_spent(), before_delta);
      }
      ASSERT_LE(f.rho_spent(), budget.rho);
      ASSERT_LE(f.delta_spent(), budget.delta);
      ASSERT_EQ(f.rho_spent(), rho_sum);
      ASSERT_EQ(f.delta_spent(), delta_sum);
    }
  }
}

TEST(GaussianRhoCostTest, Examples) {
  EXPECT_DOUBLE_EQ(GaussianRhoCost(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(GaussianRhoCost(20, 1), 0.00125);
  EXPECT_DOUBLE_EQ(0.1 * 0.1 / 8, 0.00125);
  for (double eps = 1e-4; eps < 50; eps *= 1.37) {
    EXPECT_NEAR(GaussianRhoCost(2.0 / eps, 1.0), eps * eps / 8.0, 1e-15 * eps * eps);
  }
  EXPECT_THROW(GaussianRhoCost(0, 1), InvalidArgument);
  EXPECT_THROW(GaussianRhoCost(1, 0), InvalidArgument);
  EXPECT_DOUBLE_EQ(GaussianSigmaForRho(0.5, 1), 1.0);
}

TEST(CdpToDpTest, Examples) {
  auto a = CdpToDp(0, 1e-6, 1e-6);
  EXPECT_EQ(a.epsilon, 0.0);
  EXPECT_EQ(a.delta, 2e-6);
  EXPECT_NEAR(CdpToDp(1, 0, std::exp(-1.0)).epsilon, 3.0, 1e-12);
  auto b = CdpToDp(0.5, 1e-6, 1e-6);
  EXPECT_NEAR(b.epsilon, 5.756521769756932, 1e-12);
  EXPECT_EQ(b.delta, 2e-6);
  EXPECT_THROW(CdpToDp(1, 0, 0), InvalidArgument);
  EXPECT_THROW(CdpToDp(1, 0, 1), InvalidArgument);
}

TEST(CdpToDpTest, StrictlyIncreasingInRho) {
  double prev = -1;
  for (double rho = 0; rho < 5; rho += 0.01) {
    double eps = CdpToDp(rho, 0, 1e-6).epsilon;
    EXPECT_GT(eps, prev);
    prev = eps;
  }
}

TEST(DpToCdpTest, Examples) {
  EXPECT_EQ(DpToCdp(0, 0).rho, 0.0);
  auto a = DpToCdp(1, 0);
  EXPECT_EQ(a.rho, 0.5);
  EXPECT_EQ(a.delta, 0.0);
  auto b = DpToCdp(2, 1e-6);
  EXPECT_EQ(b.rho, 2.0);
  EXPECT_EQ(b.delta, 1e-6);
  EXPECT_THROW(DpToCdp(-0.1, 0), InvalidArgument);
}

TEST(ChargeLogCsvTest, Format) {
  PrivacyFilter f({1.0, 1e-6});
  f.TryCharge(0.5, 1e-11, "gumbel");
  f.TryCharge(0.75, 0, "gaussian");
  std::ostringstream out;
  WriteChargeLogCsv(f, out);
  EXPECT_EQ(out.str(),
            "label,rho,delta,accepted\n"
            "gumbel,0.5,1e-11,true\n"
            "gaussian,0.75,0,false\n");
}

}  // namespace
}  // namespace pcr
