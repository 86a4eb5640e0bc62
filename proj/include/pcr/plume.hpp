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

// Contribution-bounding baseline:
//
//   1. bound every user to m distinct items,
//   2. select partitions privately on the bounded data,
//   3. restrict the ORIGINAL records to the selected domain,
//   4. bound again to m' distinct items,
//   5. release every count with Gaussian noise,
//
// optionally followed by dropping noisy counts below (2 + r) sigma / r.
//
// The bounds m and m' are non-private percentiles of the per-user distinct
// item counts. Partition selection gets alpha * rho and all of delta; the
// Gaussian release gets the rest of rho.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcr/accounting.hpp"
#include "pcr/common.hpp"
#include "pcr/data_model.hpp"
#include "pcr/random.hpp"
#include "pcr/release.hpp"

namespace pcr {

using ItemSet = std::set<std::string, std::less<>>;

enum class SensitivityConvention {
  kPaperMPrime,  // l2 sensitivity = m'
  kSqrtMPrime,   // l2 sensitivity = sqrt(m')
};

inline SensitivityConvention ParseSensitivityConvention(std::string_view name) {
  if (name == "paper_m_prime") return SensitivityConvention::kPaperMPrime;
  if (name == "sqrt_m_prime") return SensitivityConvention::kSqrtMPrime;
  throw InvalidArgument("unknown sensitivity convention '" + std::string(name) +
                        "' (expected paper_m_prime or sqrt_m_prime)");
}

inline const char* ToString(SensitivityConvention c) {
  return c == SensitivityConvention::kPaperMPrime ? "paper_m_prime"
                                                  : "sqrt_m_prime";
}

struct PlumeParams {
  double alpha = 0.5;  // share of rho spent on partition selection
  double percentile = 95;
  double target_rel_error = 0.1;
  bool apply_threshold = false;
  SensitivityConvention sensitivity = SensitivityConvention::kPaperMPrime;

  void Validate() const {
    Require(alpha > 0 && alpha < 1, "alpha must lie in (0, 1)");
    Require(percentile > 0 && percentile <= 100, "percentile must lie in (0, 100]");
    Require(target_rel_error > 0, "target relative error must be positive");
  }
};

struct BoundedRecordSet {
  RecordSet records;
  int64_t bound_m = 1;
};

// Users holding more than m distinct items keep a uniformly random m-subset
// of them (all records of the kept items survive). Users are visited in
// ascending id order so the draw sequence depends only on the data.
template <BitSource G>
BoundedRecordSet BoundContributions(const RecordSet& rs, int64_t m, G& gen) {
  Require(m >= 1, "contribution bound must be >= 1");
  auto pairs = internal::DistinctPairs(rs);
  std::unordered_map<std::string_view, std::vector<std::string_view>> kept;
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j].first == pairs[i].first) ++j;
    const auto n = static_cast<int64_t>(j - i);
    if (n > m) {
      std::vector<std::string_view> items;
      items.reserve(j - i);
      for (std::size_t t = i; t < j; ++t) items.push_back(pairs[t].second);
      // Partial Fisher-Yates.
      for (int64_t t = 0; t < m; ++t) {
        auto pick = static_cast<std::size_t>(t) +
                    UniformIndex(gen, static_cast<uint64_t>(n - t));
        std::swap(items[static_cast<std::size_t>(t)], items[pick]);
      }
      items.resize(static_cast<std::size_t>(m));
      std::sort(items.begin(), items.end());
      kept.emplace(pairs[i].first, std::move(items));
    }
    i = j;
  }

  BoundedRecordSet out;
  out.bound_m = m;
  out.records.reserve(rs.size());
  for (const auto& r : rs) {
    auto it = kept.find(r.user);
    if (it == kept.end() ||
        std::binary_search(it->second.begin(), it->second.end(),
                           std::string_view(r.item))) {
      out.records.Add(r.user, r.item);
    }
  }
  return out;
}

// Threshold for Gaussian partition selection. One user changes at most m
// counts, each by one, so a union bound over those m counts with the tail
// bound P(Z > t) <= exp(-t^2 / 2) / 2 gives total delta.
inline double PartitionSelectionThreshold(int64_t m, double sigma, double delta) {
  Require(m >= 1, "m must be >= 1");
  Require(sigma > 0, "sigma must be positive");
  Require(delta > 0 && delta < static_cast<double>(m) / 2.0,
          "partition selection delta must lie in (0, m/2)");
  return 1.0 + sigma * std::sqrt(2.0 * std::log(static_cast<double>(m) / (2.0 * delta)));
}

struct PartitionSelection {
  ItemSet items;
  double sigma = 0;
  double threshold = 0;
};

// Adds N(0, m / (2 rho)) to every positive bounded count (l2 sensitivity
// sqrt(m)) and keeps items whose noisy count exceeds the threshold.
template <BitSource G>
PartitionSelection PartitionSelect(const BoundedRecordSet& bounded, double rho,
                                   double delta, G& gen) {
  Require(rho > 0, "partition selection rho must be positive");
  PartitionSelection out;
  const auto m = static_cast<double>(bounded.bound_m);
  out.sigma = std::sqrt(m / (2.0 * rho));
  out.threshold = PartitionSelectionThreshold(bounded.bound_m, out.sigma, delta);
  Histogram h = BuildHistogram(bounded.records);
  for (const auto& [item, count] : h.counts()) {
    double noisy = static_cast<double>(count) + SampleGaussian(out.sigma, gen);
    if (noisy > out.threshold) out.items.insert(item);
  }
  return out;
}

inline RecordSet RestrictRecords(const RecordSet& rs, const ItemSet& domain) {
  RecordSet out;
  for (const auto& r : rs) {
    if (domain.find(r.item) != domain.end()) out.Add(r.user, r.item);
  }
  return out;
}

// Every count gets N(0, sigma^2) with sigma = l2_sensitivity / sqrt(2 rho).
// Entries come out in ascending item order.
template <BitSource G>
std::vector<ReleaseEntry> GaussianRelease(const Histogram& h, double l2_sensitivity,
                                          double rho, G& gen) {
  const double sigma = GaussianSigmaForRho(rho, l2_sensitivity);
  std::vector<ReleaseEntry> entries;
  entries.reserve(h.size());
  for (const auto& [item, count] : h.counts()) {
    entries.push_back(
        {item, static_cast<double>(count) + SampleGaussian(sigma, gen), sigma, 0.0, 0});
  }
  return entries;
}

// Noisy counts above this are likely within relative error r.
inline double PlumeThreshold(double sigma, double r) {
  Require(sigma > 0 && r > 0, "sigma and r must be positive");
  return (2.0 + r) * sigma / r;
}

struct PlumeManifest {
  int64_t m = 0;
  int64_t m_prime = 0;
  double sigma_ps = 0;
  double tau = 0;
  double sigma_release = 0;
  double threshold = 0;  // computed even when not applied
  bool threshold_applied = false;
};

struct PlumeResult {
  ReleasedHistogram release;
  PlumeManifest manifest;
  // Noisy release before thresholding; equals release.entries when no
  // threshold is applied.
  std::vector<ReleaseEntry> unthresholded;
};

inline constexpr const char* kPartitionSelectionLabel = "partition_selection";
inline constexpr const char* kGaussianReleaseLabel = "gaussian_release";

template <BitSource G>
PlumeResult PlumeRun(const RecordSet& rs, const PrivacyBudget& budget,
                     const PlumeParams& params, G& gen) {
  params.Validate();
  budget.Validate();
  Require(budget.rho > 0, "budget rho must be positive");
  Require(budget.delta > 0, "budget delta must be positive");
  Require(!rs.empty(), "record set is empty");

  PlumeResult out{{{}, PrivacyFilter(budget)}, {}, {}};
  PrivacyFilter& filter = out.release.filter_final;
  PlumeManifest& manifest = out.manifest;
  manifest.threshold_applied = params.apply_threshold;

  const double rho_ps = params.alpha * budget.rho;
  double rho_cr = budget.rho - rho_ps;
  Require(filter.TryCharge(rho_ps, budget.delta, kPartitionSelectionLabel),
          "partition selection does not fit the budget");
  // rho_ps + (rho - rho_ps) may round above rho.
  while (!filter.CanCharge(rho_cr, 0.0)) rho_cr = std::nextafter(rho_cr, 0.0);
  filter.TryCharge(rho_cr, 0.0, kGaussianReleaseLabel);

  manifest.m = ContributionPercentile(rs, params.percentile);
  BoundedRecordSet bounded = BoundContributions(rs, manifest.m, gen);
  PartitionSelection selected = PartitionSelect(bounded, rho_ps, budget.delta, gen);
  manifest.sigma_ps = selected.sigma;
  manifest.tau = selected.threshold;

  RecordSet restricted = RestrictRecords(rs, selected.items);
  if (restricted.empty()) {
    manifest.sigma_release = std::numeric_limits<double>::quiet_NaN();
    manifest.threshold = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  manifest.m_prime = ContributionPercentile(restricted, params.percentile);
  BoundedRecordSet rebounded = BoundContributions(restricted, manifest.m_prime, gen);
  const double l2 = params.sensitivity == SensitivityConvention::kPaperMPrime
                        ? static_cast<double>(manifest.m_prime)
                        : std::sqrt(static_cast<double>(manifest.m_prime));
  out.unthresholded = GaussianRelease(BuildHistogram(rebounded.records), l2, rho_cr, gen);
  manifest.sigma_release = GaussianSigmaForRho(rho_cr, l2);
  manifest.threshold = PlumeThreshold(manifest.sigma_release, params.target_rel_error);

  if (!params.apply_threshold) {
    out.release.entries = out.unthresholded;
  } else {
    for (const auto& e : out.unthresholded) {
      if (e.noisy_count > manifest.threshold) out.release.entries.push_back(e);
    }
  }
  return out;
}

}  // namespace pcr
