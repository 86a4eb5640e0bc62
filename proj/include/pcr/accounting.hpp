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

// Approximate zCDP accounting: a privacy filter over adaptively chosen
// (rho_i, delta_i) charges, the Gaussian mechanism's rho cost and the
// conversions between zCDP and (epsilon, delta)-DP. All logarithms are
// natural.

#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pcr/common.hpp"
#include "pcr/csv.hpp"

namespace pcr {

struct PrivacyBudget {
  double rho = 0;
  double delta = 0;

  void Validate() const {
    Require(std::isfinite(rho) && rho >= 0, "budget rho must be >= 0");
    Require(delta >= 0 && delta < 1, "budget delta must lie in [0, 1)");
  }
};

struct Charge {
  double rho = 0;
  double delta = 0;
  std::string label;
  bool accepted = false;
};

// Running spend against a fixed budget. A charge is accepted only when both
// running sums stay within budget; rejected charges leave the spend untouched
// and are kept in the log for reporting.
//
// Callers must obtain acceptance BEFORE running the mechanism being paid for.
class PrivacyFilter {
 public:
  explicit PrivacyFilter(PrivacyBudget budget) : budget_(budget) {
    budget_.Validate();
  }

  bool CanCharge(double rho, double delta) const {
    return rho_spent_ + rho <= budget_.rho && delta_spent_ + delta <= budget_.delta;
  }

  bool TryCharge(double rho, double delta, std::string label) {
    Require(rho >= 0 && delta >= 0, "charges must be non-negative");
    bool ok = CanCharge(rho, delta);
    if (ok) {
      rho_spent_ += rho;
      delta_spent_ += delta;
    }
    log_.push_back({rho, delta, std::move(label), ok});
    return ok;
  }

  const PrivacyBudget& budget() const { return budget_; }
  double rho_spent() const { return rho_spent_; }
  double delta_spent() const { return delta_spent_; }
  double rho_remaining() const { return budget_.rho - rho_spent_; }
  const std::vector<Charge>& log() const { return log_; }

 private:
  PrivacyBudget budget_;
  double rho_spent_ = 0;
  double delta_spent_ = 0;
  std::vector<Charge> log_;
};

// rho of the Gaussian mechanism with noise sigma on an l2-sensitivity
// `l2_sensitivity` query.
inline double GaussianRhoCost(double sigma, double l2_sensitivity) {
  Require(sigma > 0, "sigma must be positive");
  Require(l2_sensitivity > 0, "l2 sensitivity must be positive");
  return (l2_sensitivity * l2_sensitivity) / (2.0 * sigma * sigma);
}

// Noise scale that makes the Gaussian mechanism rho-zCDP.
inline double GaussianSigmaForRho(double rho, double l2_sensitivity) {
  Require(rho > 0, "rho must be positive");
  Require(l2_sensitivity > 0, "l2 sensitivity must be positive");
  return l2_sensitivity / std::sqrt(2.0 * rho);
}

struct EpsilonDelta {
  double epsilon = 0;
  double delta = 0;
};

struct RhoDelta {
  double rho = 0;
  double delta = 0;
};

// delta-approximate rho-zCDP => (rho + 2 sqrt(rho ln(1/delta')), delta + delta')-DP.
inline EpsilonDelta CdpToDp(double rho, double delta, double delta_prime) {
  Require(rho >= 0, "rho must be >= 0");
  Require(delta_prime > 0 && delta_prime < 1, "delta' must lie in (0, 1)");
  return {rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta_prime)),
          delta + delta_prime};
}

// (epsilon, delta)-DP => delta-approximate epsilon^2/2-zCDP.
inline RhoDelta DpToCdp(double epsilon, double delta) {
  Require(epsilon >= 0, "epsilon must be >= 0");
  return {epsilon * epsilon / 2.0, delta};
}

// `label,rho,delta,accepted`
inline void WriteChargeLogCsv(const PrivacyFilter& filter, std::ostream& out) {
  out << "label,rho,delta,accepted\n";
  for (const auto& c : filter.log()) {
    std::string rho = FormatDouble(c.rho);
    std::string delta = FormatDouble(c.delta);
    csv::WriteRow(out, {c.label, rho, delta, c.accepted ? "true" : "false"});
  }
}

}  // namespace pcr
