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

// Private count release without contribution bounds.
//
// Items are discovered one at a time with the unknown-domain Gumbel mechanism
// run on the top-k_bar counts, and each discovered item's count is released
// with Gaussian noise. Every round is paid for through a PrivacyFilter:
//
//   * a selection at epsilon costs (epsilon^2 / 8, delta_star);
//   * a Gaussian release with noise sigma costs (1 / (2 sigma^2), 0);
//   * a round only starts if (epsilon^2 / 4, delta_star) still fits.
//
// When a selection returns no item epsilon grows by sqrt(2). Sigma is floored
// at 2 / epsilon so the Gaussian never costs more than the epsilon^2 / 8 that
// the round reserved for it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pcr/accounting.hpp"
#include "pcr/common.hpp"
#include "pcr/data_model.hpp"
#include "pcr/random.hpp"
#include "pcr/release.hpp"

namespace pcr {

struct PcrParams {
  double epsilon_star = 0.0005;  // starting (smallest) per-round epsilon
  double delta_star = 1e-11;     // delta charged per selection round
  std::size_t k_bar = 10000;     // size of the ranked view
  double target_rel_error = 0.1;
  double sigma_safety_factor = 1.5;

  void Validate() const {
    Require(epsilon_star > 0 && std::isfinite(epsilon_star),
            "epsilon_star must be positive");
    Require(delta_star > 0 && delta_star < 1, "delta_star must lie in (0, 1)");
    Require(k_bar >= 1, "k_bar must be >= 1");
    Require(target_rel_error > 0, "target relative error must be positive");
    Require(sigma_safety_factor > 0, "sigma safety factor must be positive");
  }
};

// Threshold offset that makes a selection at `epsilon` delta_star-approximate.
inline double UdgThreshold(double epsilon, double delta_star, std::size_t k_bar) {
  Require(epsilon > 0, "epsilon must be positive");
  Require(delta_star > 0 && delta_star < 1, "delta_star must lie in (0, 1)");
  Require(k_bar >= 1, "k_bar must be >= 1");
  return 1.0 + std::log(static_cast<double>(k_bar) / delta_star) / epsilon;
}

// Noise level for a count discovered at `epsilon`: the discovered count is
// likely at least UdgThreshold(epsilon), so this sigma keeps
// count + factor * sigma within (1 + r) of it.
inline double SigmaTarget(double epsilon, const PcrParams& params) {
  Require(epsilon > 0, "epsilon must be positive");
  params.Validate();
  return (params.target_rel_error / params.sigma_safety_factor) *
         UdgThreshold(epsilon, params.delta_star, params.k_bar);
}

struct UdgSelection {
  std::vector<std::string> items;  // best first
  bool bottom = false;             // fewer than k items cleared the threshold
};

// Unknown-domain Gumbel on a top-k_bar view. The noisy threshold is
// threshold + tail_count + Gumbel(beta); each positive top count gets its own
// Gumbel(beta) and the (at most k) noisy counts above the noisy threshold are
// returned in descending order. Draw order: the threshold noise first, then
// one draw per positive item in view order.
template <BitSource G>
UdgSelection UdgSelect(const TopKView& view, double beta, double threshold,
                       std::size_t k, G& gen) {
  Require(beta > 0, "beta must be positive");
  Require(k >= 1 && k <= view.k_bar, "k must lie in [1, k_bar]");
  const double noisy_threshold = threshold +
                                 static_cast<double>(view.tail_count) +
                                 SampleGumbel(beta, gen);
  std::vector<std::pair<double, std::size_t>> passed;
  for (std::size_t i = 0; i < view.top.size(); ++i) {
    if (view.top[i].count <= 0) continue;
    double noisy = static_cast<double>(view.top[i].count) + SampleGumbel(beta, gen);
    if (noisy > noisy_threshold) passed.emplace_back(noisy, i);
  }
  std::size_t keep = std::min(k, passed.size());
  std::partial_sort(passed.begin(), passed.begin() + static_cast<std::ptrdiff_t>(keep),
                    passed.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  UdgSelection result;
  for (std::size_t i = 0; i < keep; ++i) {
    result.items.push_back(view.top[passed[i].second].item);
  }
  result.bottom = keep < k;
  return result;
}

inline constexpr const char* kGumbelChargeLabel = "gumbel";
inline constexpr const char* kGaussianChargeLabel = "gaussian";

template <BitSource G>
ReleasedHistogram PcrRun(const Histogram& h, const PrivacyBudget& budget,
                         const PcrParams& params, G& gen) {
  params.Validate();
  budget.Validate();
  Require(budget.rho > params.epsilon_star * params.epsilon_star / 4.0,
          "budget rho must exceed epsilon_star^2 / 4");
  Require(budget.delta > params.delta_star, "budget delta must exceed delta_star");

  ReleasedHistogram out{{}, PrivacyFilter(budget)};
  PrivacyFilter& filter = out.filter_final;
  std::vector<HistogramEntry> working = h.SortedEntries();
  double epsilon = params.epsilon_star;
  int64_t round = 0;

  while (filter.CanCharge(epsilon * epsilon / 4.0, params.delta_star)) {
    ++round;
    const double beta = 1.0 / epsilon;
    const double threshold = UdgThreshold(epsilon, params.delta_star, params.k_bar);
    TopKView view = TopViewOfSorted(working, params.k_bar);
    UdgSelection selection = UdgSelect(view, beta, threshold, 1, gen);
    // Fits: the loop condition reserved twice this amount.
    filter.TryCharge(epsilon * epsilon / 8.0, params.delta_star, kGumbelChargeLabel);

    if (selection.bottom) {
      epsilon *= std::numbers::sqrt2;
      continue;
    }

    const std::string& item = selection.items.front();
    const double sigma = std::max(SigmaTarget(epsilon, params), 2.0 / epsilon);
    // Rounding in the running sum can, in principle, push this last charge
    // over by an ulp; the release is then withheld and the run ends.
    if (!filter.TryCharge(GaussianRhoCost(sigma, 1.0), 0.0, kGaussianChargeLabel)) {
      break;
    }
    auto it = std::find_if(working.begin(), working.end(),
                           [&](const HistogramEntry& e) { return e.item == item; });
    const double noisy = static_cast<double>(it->count) + SampleGaussian(sigma, gen);
    out.entries.push_back({item, noisy, sigma, epsilon, round});
    working.erase(it);
  }
  return out;
}

}  // namespace pcr
