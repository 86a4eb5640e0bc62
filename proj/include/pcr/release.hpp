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

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pcr/accounting.hpp"
#include "pcr/common.hpp"
#include "pcr/csv.hpp"

namespace pcr {

// One released count. `epsilon_at_release` and `round_index` describe the
// selection round that discovered the item; they are 0 for releases that
// involve no selection round (the contribution-bounding baseline).
struct ReleaseEntry {
  std::string item;
  double noisy_count = 0;
  double sigma = 0;
  double epsilon_at_release = 0;
  int64_t round_index = 0;

  friend bool operator==(const ReleaseEntry&, const ReleaseEntry&) = default;
};

struct ReleasedHistogram {
  std::vector<ReleaseEntry> entries;  // discovery order
  PrivacyFilter filter_final;
};

// `item,noisy_count,sigma,epsilon_at_release,round_index`. Doubles are
// written in shortest round-trip form.
inline void WriteReleaseCsv(const std::vector<ReleaseEntry>& entries,
                            std::ostream& out) {
  out << "item,noisy_count,sigma,epsilon_at_release,round_index\n";
  for (const auto& e : entries) {
    std::string noisy = FormatDouble(e.noisy_count);
    std::string sigma = FormatDouble(e.sigma);
    std::string eps = FormatDouble(e.epsilon_at_release);
    std::string round = std::to_string(e.round_index);
    csv::WriteRow(out, {e.item, noisy, sigma, eps, round});
  }
}

inline std::vector<ReleaseEntry> ReadReleaseCsv(
    std::istream& in, std::string_view source_name = "<stream>") {
  const std::string source(source_name);
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.Next(row)) throw IoError(source + ": empty file");
  const char* names[] = {"item", "noisy_count", "sigma", "epsilon_at_release",
                         "round_index"};
  long idx[5];
  for (int i = 0; i < 5; ++i) {
    idx[i] = csv::ColumnIndex(row, names[i]);
    if (idx[i] < 0) {
      throw IoError(source + ": missing column '" + names[i] + "'");
    }
  }
  std::vector<ReleaseEntry> entries;
  while (reader.Next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    auto at = [&](int i) -> const std::string& {
      auto k = static_cast<std::size_t>(idx[i]);
      if (k >= row.size()) {
        throw IoError(source + ": line " + std::to_string(reader.line()) +
                      " is malformed");
      }
      return row[k];
    };
    auto noisy = ParseDouble(at(1));
    auto sigma = ParseDouble(at(2));
    auto eps = ParseDouble(at(3));
    auto round = ParseInt(at(4));
    if (at(0).empty() || !noisy || !sigma || !eps || !round) {
      throw IoError(source + ": line " + std::to_string(reader.line()) +
                    " has an invalid value");
    }
    entries.push_back({at(0), *noisy, *sigma, *eps, *round});
  }
  return entries;
}

inline std::vector<ReleaseEntry> ReadReleaseCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadReleaseCsv(in, path);
}

}  // namespace pcr
