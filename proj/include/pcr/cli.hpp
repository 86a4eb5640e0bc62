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

// `pcr_cli` subcommands:
//   histogram  build a distinct-user histogram and write it as item,count CSV
//   stats      users, domain size and contribution percentiles
//   run        run an experiment config (flags override the file)
//   score      re-score a saved release against a cached histogram
//
// Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcr/common.hpp"
#include "pcr/data_model.hpp"
#include "pcr/eval.hpp"
#include "pcr/release.hpp"

namespace pcr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

namespace cli_internal {

struct DatasetFlags {
  std::string dataset;
  std::string format = "pairs_csv";
  std::string user_column = "user_id";
  std::string item_column = "item";
  std::string text_column = "text";
  bool row_index_users = false;

  void Register(CLI::App* app, bool required) {
    auto* d = app->add_option("--dataset", dataset, "input CSV");
    if (required) d->required();
    app->add_option("--format", format, "pairs_csv | user_text_csv");
    app->add_option("--user-column", user_column, "user id column");
    app->add_option("--item-column", item_column, "item column (pairs_csv)");
    app->add_option("--text-column", text_column, "text column (user_text_csv)");
    app->add_flag("--row-index-users", row_index_users,
                  "use the data row index as the user id");
  }

  LoadOptions options() const {
    LoadOptions o;
    o.format = ParseRecordFormat(format);
    o.user_column = row_index_users ? "" : user_column;
    o.item_column = item_column;
    o.text_column = text_column;
    return o;
  }
};

}  // namespace cli_internal

inline int CliMain(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Differentially private count release"};
  app.name("pcr_cli");
  app.require_subcommand(1);

  cli_internal::DatasetFlags hist_flags;
  std::string hist_out;
  auto* hist = app.add_subcommand("histogram", "build and cache a histogram CSV");
  hist_flags.Register(hist, true);
  hist->add_option("--out", hist_out, "output path (default stdout)");

  cli_internal::DatasetFlags stats_flags;
  auto* stats = app.add_subcommand("stats", "dataset statistics");
  stats_flags.Register(stats, true);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  bool timing = false;
  bool row_index_users = false;
  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("--config", config_path, "key = value config file");
  struct KeyFlag {
    const char* flag;
    const char* key;
    const char* help;
  };
  const KeyFlag key_flags[] = {
      {"--dataset", "dataset", "input file"},
      {"--format", "format", "pairs_csv | user_text_csv | histogram_csv"},
      {"--user-column", "user_column", "user id column"},
      {"--item-column", "item_column", "item column"},
      {"--text-column", "text_column", "text column"},
      {"--method", "method", "pcr | plume | plume_threshold"},
      {"--rho", "rho", "comma separated rho grid"},
      {"--delta", "delta", "overall delta"},
      {"--trials", "trials", "trials per rho"},
      {"--seed", "seed", "base seed"},
      {"--output-dir", "output_dir", "output directory"},
      {"--jobs", "jobs", "parallel trials"},
      {"--epsilon-star", "epsilon_star", "starting epsilon"},
      {"--delta-star", "delta_star", "delta per selection"},
      {"--k-bar", "k_bar", "ranked view size"},
      {"--target-rel-error", "target_rel_error", "target relative error"},
      {"--sigma-safety-factor", "sigma_safety_factor", "sigma constant"},
      {"--alpha", "alpha", "partition selection share"},
      {"--percentile", "percentile", "contribution percentile"},
      {"--sensitivity", "sensitivity", "paper_m_prime | sqrt_m_prime"},
  };
  for (const auto& kf : key_flags) {
    run->add_option_function<std::string>(
        kf.flag, [&overrides, key = kf.key](const std::string& v) { overrides[key] = v; },
        kf.help);
  }
  run->add_flag("--timing", timing, "record runtime_ms");
  run->add_flag("--row-index-users", row_index_users,
                "use the data row index as the user id");

  std::string release_path;
  std::string histogram_path;
  double target_rel_error = 0.1;
  auto* score = app.add_subcommand("score", "score a saved release");
  score->add_option("--release", release_path, "release CSV")->required();
  score->add_option("--histogram", histogram_path, "cached histogram CSV")->required();
  score->add_option("--target-rel-error", target_rel_error, "target relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*hist) {
      Histogram h = BuildHistogram(LoadRecords(hist_flags.dataset, hist_flags.options()));
      if (hist_out.empty()) {
        WriteHistogramCsv(h, out);
      } else {
        std::ofstream f(hist_out, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write '" + hist_out + "'");
        WriteHistogramCsv(h, f);
      }
    } else if (*stats) {
      RecordSet rs = LoadRecords(stats_flags.dataset, stats_flags.options());
      ContributionStats cs(rs);
      out << "users=" << cs.num_users() << '\n'
          << "domain=" << BuildHistogram(rs).size() << '\n';
      for (int p : {50, 75, 95, 99}) out << 'p' << p << '=' << cs.Percentile(p) << '\n';
    } else if (*run) {
      ExperimentConfig cfg;
      if (!config_path.empty()) ApplyConfigFile(cfg, config_path);
      for (const auto& [key, value] : overrides) ApplyConfigKey(cfg, key, value);
      if (timing) cfg.record_timing = true;
      if (row_index_users) cfg.user_column.clear();
      cfg.Validate();
      Dataset data = LoadDataset(cfg);
      ExperimentResult result = RunExperiment(cfg, data);
      WriteExperimentOutputs(cfg, result);
      WriteMetricsCsv(result.rows, out);
    } else if (*score) {
      Histogram truth = ReadHistogramCsv(histogram_path);
      auto entries = ReadReleaseCsv(release_path);
      ReleaseScore s = ScoreRelease(entries, truth, target_rel_error);
      out << "num_results,frac_within_target,vacuous,mean_rel_error_pct,"
             "median_rel_error_pct\n"
          << s.num_results << ',' << FormatDouble(s.frac_within_target) << ','
          << (s.vacuous ? "true" : "false") << ','
          << FormatDouble(s.mean_rel_error_pct) << ','
          << FormatDouble(s.median_rel_error_pct) << '\n';
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace pcr
