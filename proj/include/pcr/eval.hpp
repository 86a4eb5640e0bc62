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

// Experiment configuration, trial execution and recall/precision scoring.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pcr/accounting.hpp"
#include "pcr/common.hpp"
#include "pcr/data_model.hpp"
#include "pcr/pcr_engine.hpp"
#include "pcr/plume.hpp"
#include "pcr/random.hpp"
#include "pcr/release.hpp"

namespace pcr {

// |c - noisy| / c * 100
inline double RelativeErrorPct(int64_t true_count, double noisy_count) {
  Require(true_count >= 1, "true count must be >= 1");
  const auto c = static_cast<double>(true_count);
  return std::abs(c - noisy_count) / c * 100.0;
}

struct ReleaseScore {
  int64_t num_results = 0;
  double frac_within_target = 1.0;
  bool vacuous = true;  // no results; frac_within_target is then 1.0
  double mean_rel_error_pct = 0;
  double median_rel_error_pct = 0;
  std::vector<double> rel_errors_pct;  // release order

  friend bool operator==(const ReleaseScore&, const ReleaseScore&) = default;
};

inline ReleaseScore ScoreRelease(const std::vector<ReleaseEntry>& entries,
                                 const Histogram& truth, double target_rel_error) {
  Require(target_rel_error > 0, "target relative error must be positive");
  ReleaseScore s;
  s.num_results = static_cast<int64_t>(entries.size());
  if (entries.empty()) return s;
  s.vacuous = false;
  const double limit = 100.0 * target_rel_error;
  int64_t within = 0;
  double sum = 0;
  for (const auto& e : entries) {
    const int64_t c = truth.count(e.item);
    if (c < 1) {
      throw InvalidArgument("released item '" + e.item +
                            "' is not in the true histogram");
    }
    double err = RelativeErrorPct(c, e.noisy_count);
    s.rel_errors_pct.push_back(err);
    sum += err;
    if (err <= limit) ++within;
  }
  const auto n = static_cast<double>(entries.size());
  s.frac_within_target = static_cast<double>(within) / n;
  s.mean_rel_error_pct = sum / n;
  std::vector<double> sorted = s.rel_errors_pct;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median_rel_error_pct = sorted.size() % 2 ? sorted[mid]
                                             : (sorted[mid - 1] + sorted[mid]) / 2.0;
  return s;
}

enum class Method { kPcr, kPlume, kPlumeThreshold };

inline Method ParseMethod(std::string_view name) {
  if (name == "pcr") return Method::kPcr;
  if (name == "plume") return Method::kPlume;
  if (name == "plume_threshold") return Method::kPlumeThreshold;
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected pcr, plume or plume_threshold)");
}

inline const char* ToString(Method m) {
  switch (m) {
    case Method::kPcr: return "pcr";
    case Method::kPlume: return "plume";
    case Method::kPlumeThreshold: return "plume_threshold";
  }
  return "?";
}

inline std::string DefaultOutputDir() {
  const char* env = std::getenv("PCR_OUTPUT_DIR");
  return env && *env ? env : "pcr_out";
}

struct ExperimentConfig {
  std::string dataset;
  // pairs_csv, user_text_csv, or histogram_csv (a cached histogram; PCR only).
  std::string format = "pairs_csv";
  std::string user_column = "user_id";
  std::string item_column = "item";
  std::string text_column = "text";
  Method method = Method::kPcr;
  std::vector<double> rho_grid = {0.1, 0.5, 1.0};
  double delta = 1e-6;
  int64_t trials = 10;
  uint64_t base_seed = 0;
  PcrParams pcr;
  PlumeParams plume;
  std::string output_dir = DefaultOutputDir();
  int jobs = 1;
  // runtime_ms is written as 0 unless enabled, keeping the CSV reproducible.
  bool record_timing = false;

  void Validate() const {
    Require(trials >= 1, "trials must be >= 1");
    Require(!rho_grid.empty(), "rho grid must be non-empty");
    for (double rho : rho_grid) {
      Require(rho > 0 && std::isfinite(rho), "every rho must be positive");
    }
    Require(delta > 0 && delta < 1, "delta must lie in (0, 1)");
    Require(jobs >= 1, "jobs must be >= 1");
    Require(format == "pairs_csv" || format == "user_text_csv" ||
                format == "histogram_csv",
            "format must be pairs_csv, user_text_csv or histogram_csv");
    Require(!(format == "histogram_csv" && method != Method::kPcr),
            "plume methods need record-level input, not histogram_csv");
    pcr.Validate();
    plume.Validate();
  }

  LoadOptions load_options() const {
    LoadOptions o;
    o.format = ParseRecordFormat(format);
    o.user_column = user_column;
    o.item_column = item_column;
    o.text_column = text_column;
    return o;
  }
};

inline std::vector<double> ParseDoubleList(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    auto v = ParseDouble(text.substr(start, comma - start));
    Require(v.has_value(), "invalid number list '" + std::string(text) + "'");
    values.push_back(*v);
    start = comma + 1;
  }
  return values;
}

inline bool ParseBool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("invalid boolean '" + std::string(text) + "'");
}

// Applies one `key = value` setting. Keys match the config file schema.
inline void ApplyConfigKey(ExperimentConfig& cfg, std::string_view key,
                           std::string_view value) {
  auto number = [&]() {
    auto v = ParseDouble(value);
    Require(v.has_value(), "invalid number for '" + std::string(key) + "'");
    return *v;
  };
  auto integer = [&]() {
    auto v = ParseInt(value);
    Require(v.has_value(), "invalid integer for '" + std::string(key) + "'");
    return *v;
  };
  const std::string v(value);
  if (key == "dataset") cfg.dataset = v;
  else if (key == "format") cfg.format = v;
  else if (key == "user_column") cfg.user_column = v;
  else if (key == "item_column") cfg.item_column = v;
  else if (key == "text_column") cfg.text_column = v;
  else if (key == "method") cfg.method = ParseMethod(value);
  else if (key == "rho") cfg.rho_grid = ParseDoubleList(value);
  else if (key == "delta") cfg.delta = number();
  else if (key == "trials") cfg.trials = integer();
  else if (key == "seed") {
    auto s = integer();
    cfg.base_seed = static_cast<uint64_t>(s);
  }
  else if (key == "output_dir") cfg.output_dir = v;
  else if (key == "jobs") cfg.jobs = static_cast<int>(integer());
  else if (key == "timing") cfg.record_timing = ParseBool(value);
  else if (key == "epsilon_star") cfg.pcr.epsilon_star = number();
  else if (key == "delta_star") cfg.pcr.delta_star = number();
  else if (key == "k_bar") {
    auto k = integer();
    Require(k >= 1, "k_bar must be >= 1");
    cfg.pcr.k_bar = static_cast<std::size_t>(k);
  }
  else if (key == "target_rel_error") {
    cfg.pcr.target_rel_error = number();
    cfg.plume.target_rel_error = cfg.pcr.target_rel_error;
  }
  else if (key == "sigma_safety_factor") cfg.pcr.sigma_safety_factor = number();
  else if (key == "alpha") cfg.plume.alpha = number();
  else if (key == "percentile") cfg.plume.percentile = number();
  else if (key == "sensitivity") cfg.plume.sensitivity = ParseSensitivityConvention(value);
  else throw InvalidArgument("unknown config key '" + std::string(key) + "'");
}

// Flat `key = value` text. Blank lines and lines starting with '#' are
// ignored.
inline void ApplyConfigText(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  int line_no = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    Require(eq != std::string_view::npos,
            "config line " + std::to_string(line_no) + ": expected key = value");
    ApplyConfigKey(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
}

inline void ApplyConfigFile(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  ApplyConfigText(cfg, in);
}

struct Dataset {
  std::optional<RecordSet> records;  // absent for histogram_csv input
  Histogram truth;
};

inline Dataset LoadDataset(const ExperimentConfig& cfg) {
  Require(!cfg.dataset.empty(), "no dataset given");
  Dataset d;
  if (cfg.format == "histogram_csv") {
    d.truth = ReadHistogramCsv(cfg.dataset);
  } else {
    d.records = LoadRecords(cfg.dataset, cfg.load_options());
    d.truth = BuildHistogram(*d.records);
  }
  return d;
}

// Seed for one (method, rho, trial) cell. Independent of the other grid
// values, so extending the grid does not disturb existing cells.
inline uint64_t TrialSeed(uint64_t base_seed, Method method, double rho,
                          int64_t trial) {
  std::string key = std::string(ToString(method)) + "|" + FormatDouble(rho) + "|" +
                    std::to_string(trial);
  return base_seed + Fnv1a64(key);
}

struct MetricsRow {
  std::string method;
  double rho = 0;
  std::optional<int64_t> trial;  // nullopt for the per-rho average row
  double num_results = 0;
  double frac_within_target = 1.0;
  bool vacuous = true;
  double mean_rel_error_pct = 0;
  double median_rel_error_pct = 0;
  double runtime_ms = 0;
};

struct TrialOutput {
  MetricsRow row;
  std::vector<ReleaseEntry> entries;
  PrivacyFilter filter{PrivacyBudget{}};
  std::optional<PlumeManifest> manifest;
};

struct ExperimentResult {
  std::vector<TrialOutput> trials;  // sorted by (rho, trial)
  std::vector<MetricsRow> rows;     // per rho: trial rows then the average row
};

inline TrialOutput RunTrial(const ExperimentConfig& cfg, const Dataset& data,
                            double rho, int64_t trial) {
  Rng rng(TrialSeed(cfg.base_seed, cfg.method, rho, trial));
  PrivacyBudget budget{rho, cfg.delta};
  const auto start = std::chrono::steady_clock::now();

  TrialOutput out;
  if (cfg.method == Method::kPcr) {
    ReleasedHistogram r = PcrRun(data.truth, budget, cfg.pcr, rng);
    out.entries = std::move(r.entries);
    out.filter = std::move(r.filter_final);
  } else {
    Require(data.records.has_value(), "plume needs record-level input");
    PlumeParams params = cfg.plume;
    params.apply_threshold = cfg.method == Method::kPlumeThreshold;
    PlumeResult r = PlumeRun(*data.records, budget, params, rng);
    out.entries = std::move(r.release.entries);
    out.filter = std::move(r.release.filter_final);
    out.manifest = r.manifest;
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;

  ReleaseScore score = ScoreRelease(out.entries, data.truth, cfg.pcr.target_rel_error);
  MetricsRow& row = out.row;
  row.method = ToString(cfg.method);
  row.rho = rho;
  row.trial = trial;
  row.num_results = static_cast<double>(score.num_results);
  row.frac_within_target = score.frac_within_target;
  row.vacuous = score.vacuous;
  row.mean_rel_error_pct = score.mean_rel_error_pct;
  row.median_rel_error_pct = score.median_rel_error_pct;
  row.runtime_ms =
      cfg.record_timing
          ? static_cast<double>(
                std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count())
          : 0.0;
  return out;
}

// Mean over trial rows; `vacuous` holds only if every trial was vacuous.
inline MetricsRow AverageRow(const std::vector<MetricsRow>& rows) {
  Require(!rows.empty(), "no rows to average");
  MetricsRow avg;
  avg.method = rows.front().method;
  avg.rho = rows.front().rho;
  avg.trial = std::nullopt;
  avg.num_results = avg.frac_within_target = avg.mean_rel_error_pct =
      avg.median_rel_error_pct = avg.runtime_ms = 0;
  avg.vacuous = true;
  for (const auto& r : rows) {
    avg.num_results += r.num_results;
    avg.frac_within_target += r.frac_within_target;
    avg.mean_rel_error_pct += r.mean_rel_error_pct;
    avg.median_rel_error_pct += r.median_rel_error_pct;
    avg.runtime_ms += r.runtime_ms;
    avg.vacuous = avg.vacuous && r.vacuous;
  }
  const auto n = static_cast<double>(rows.size());
  avg.num_results /= n;
  avg.frac_within_target /= n;
  avg.mean_rel_error_pct /= n;
  avg.median_rel_error_pct /= n;
  avg.runtime_ms /= n;
  return avg;
}

inline ExperimentResult RunExperiment(const ExperimentConfig& cfg, const Dataset& data) {
  cfg.Validate();
  std::vector<double> rhos = cfg.rho_grid;
  std::sort(rhos.begin(), rhos.end());
  rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());

  struct Cell {
    double rho;
    int64_t trial;
  };
  std::vector<Cell> cells;
  for (double rho : rhos) {
    for (int64_t t = 0; t < cfg.trials; ++t) cells.push_back({rho, t});
  }

  ExperimentResult result;
  result.trials.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      if (failed.load()) return;
      try {
        result.trials[i] = RunTrial(cfg, data, cells[i].rho, cells[i].trial);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  const auto workers = static_cast<std::size_t>(
      std::min<int64_t>(cfg.jobs, static_cast<int64_t>(cells.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < cells.size();) {
    std::vector<MetricsRow> group;
    std::size_t j = i;
    for (; j < cells.size() && cells[j].rho == cells[i].rho; ++j) {
      group.push_back(result.trials[j].row);
    }
    result.rows.insert(result.rows.end(), group.begin(), group.end());
    result.rows.push_back(AverageRow(group));
    i = j;
  }
  return result;
}

inline constexpr std::string_view kMetricsHeader =
    "method,rho,trial,num_results,frac_within_target,vacuous,"
    "mean_rel_error_pct,median_rel_error_pct,runtime_ms";

inline void WriteMetricsCsv(const std::vector<MetricsRow>& rows, std::ostream& out) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    std::string rho = FormatDouble(r.rho);
    std::string trial = r.trial ? std::to_string(*r.trial) : "avg";
    std::string num = FormatDouble(r.num_results);
    std::string frac = FormatDouble(r.frac_within_target);
    std::string mean = FormatDouble(r.mean_rel_error_pct);
    std::string median = FormatDouble(r.median_rel_error_pct);
    std::string runtime = FormatDouble(r.runtime_ms);
    csv::WriteRow(out, {r.method, rho, trial, num, frac, r.vacuous ? "true" : "false",
                        mean, median, runtime});
  }
}

inline constexpr std::string_view kManifestHeader =
    "method,rho,trial,m,m_prime,sigma_ps,tau,sigma_release,threshold";

inline std::string TrialFileStem(const MetricsRow& row) {
  return std::string(row.method) + "_rho" + FormatDouble(row.rho) + "_trial" +
         std::to_string(row.trial.value_or(-1));
}

// Writes metrics.csv, releases/<stem>.csv, charges/<stem>.csv and, for the
// baseline methods, manifest.csv under cfg.output_dir.
inline void WriteExperimentOutputs(const ExperimentConfig& cfg,
                                   const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path root(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(root / "releases", ec);
  fs::create_directories(root / "charges", ec);
  if (ec) throw IoError("cannot create '" + root.string() + "': " + ec.message());

  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    return f;
  };
  {
    auto f = open(root / "metrics.csv");
    WriteMetricsCsv(result.rows, f);
  }
  bool any_manifest = false;
  std::ostringstream manifest;
  manifest << kManifestHeader << '\n';
  for (const auto& t : result.trials) {
    const std::string stem = TrialFileStem(t.row);
    {
      auto f = open(root / "releases" / (stem + ".csv"));
      WriteReleaseCsv(t.entries, f);
    }
    {
      auto f = open(root / "charges" / (stem + ".csv"));
      WriteChargeLogCsv(t.filter, f);
    }
    if (t.manifest) {
      any_manifest = true;
      const PlumeManifest& m = *t.manifest;
      manifest << t.row.method << ',' << FormatDouble(t.row.rho) << ','
               << *t.row.trial << ',' << m.m << ',' << m.m_prime << ','
               << FormatDouble(m.sigma_ps) << ',' << FormatDouble(m.tau) << ','
               << FormatDouble(m.sigma_release) << ',' << FormatDouble(m.threshold)
               << '\n';
    }
  }
  if (any_manifest) {
    auto f = open(root / "manifest.csv");
    f << manifest.str();
  }
}

}  // namespace pcr
