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

// User/item records, distinct-user histograms and the top-k view consumed by
// the selection mechanisms.
//
// A histogram counts DISTINCT users per item, so removing one user changes
// every count by at most one (l-infinity sensitivity 1) while the number of
// counts that user touches is unbounded.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcr/common.hpp"
#include "pcr/csv.hpp"
#include "pcr/tokenizer.hpp"

namespace pcr {

struct Record {
  std::string user;
  std::string item;

  friend bool operator==(const Record&, const Record&) = default;
};

// Raw (user, item) pairs. Duplicates are allowed and order is meaningless.
class RecordSet {
 public:
  RecordSet() = default;
  RecordSet(std::initializer_list<std::pair<std::string, std::string>> pairs) {
    for (const auto& [user, item] : pairs) Add(user, item);
  }

  void Add(std::string user, std::string item) {
    Require(!user.empty(), "record user id must be non-empty");
    Require(!item.empty(), "record item must be non-empty");
    records_.push_back({std::move(user), std::move(item)});
  }

  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }
  void reserve(std::size_t n) { records_.reserve(n); }

 private:
  std::vector<Record> records_;
};

struct HistogramEntry {
  std::string item;
  int64_t count = 0;

  friend bool operator==(const HistogramEntry&, const HistogramEntry&) = default;
};

// Descending count, then ascending item.
inline bool ReleaseOrder(const HistogramEntry& a, const HistogramEntry& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.item < b.item;
}

// item -> number of distinct users. Zero-count items are never stored.
class Histogram {
 public:
  using Map = std::map<std::string, int64_t, std::less<>>;

  Histogram() = default;
  Histogram(std::initializer_list<std::pair<const std::string, int64_t>> init) {
    for (const auto& [item, count] : init) Set(item, count);
  }

  void Set(std::string item, int64_t count) {
    Require(!item.empty(), "histogram item must be non-empty");
    Require(count >= 1, "histogram counts must be >= 1");
    counts_[std::move(item)] = count;
  }

  // Count for `item`, or 0 when absent.
  int64_t count(std::string_view item) const {
    auto it = counts_.find(item);
    return it == counts_.end() ? 0 : it->second;
  }

  bool contains(std::string_view item) const {
    return counts_.find(item) != counts_.end();
  }

  bool Remove(std::string_view item) {
    auto it = counts_.find(item);
    if (it == counts_.end()) return false;
    counts_.erase(it);
    return true;
  }

  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  const Map& counts() const { return counts_; }

  // All entries in release order.
  std::vector<HistogramEntry> SortedEntries() const {
    std::vector<HistogramEntry> entries;
    entries.reserve(counts_.size());
    for (const auto& [item, count] : counts_) entries.push_back({item, count});
    std::sort(entries.begin(), entries.end(), ReleaseOrder);
    return entries;
  }

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  Map counts_;
};

// The k_bar largest counts plus the (k_bar+1)-th count.
struct TopKView {
  std::vector<HistogramEntry> top;
  int64_t tail_count = 0;
  std::size_t k_bar = 1;
};

// Builds the view from entries that are already in release order.
inline TopKView TopViewOfSorted(std::span<const HistogramEntry> sorted,
                                std::size_t k_bar) {
  Require(k_bar >= 1, "k_bar must be >= 1");
  TopKView view;
  view.k_bar = k_bar;
  std::size_t n = std::min(k_bar, sorted.size());
  view.top.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n));
  view.tail_count = sorted.size() > k_bar ? sorted[k_bar].count : 0;
  return view;
}

inline TopKView TopView(const Histogram& h, std::size_t k_bar) {
  Require(k_bar >= 1, "k_bar must be >= 1");
  std::vector<HistogramEntry> entries;
  entries.reserve(h.size());
  for (const auto& [item, count] : h.counts()) entries.push_back({item, count});
  // Only the first k_bar + 1 positions need to be ordered.
  std::size_t keep = std::min(entries.size(), k_bar + 1);
  std::partial_sort(entries.begin(),
                    entries.begin() + static_cast<std::ptrdiff_t>(keep),
                    entries.end(), ReleaseOrder);
  entries.resize(keep);
  return TopViewOfSorted(entries, k_bar);
}

namespace internal {

using Pair = std::pair<std::string_view, std::string_view>;

// Distinct (user, item) pairs sorted by user, then item. Views point into `rs`.
inline std::vector<Pair> DistinctPairs(const RecordSet& rs) {
  std::vector<Pair> pairs;
  pairs.reserve(rs.size());
  for (const auto& r : rs) pairs.emplace_back(r.user, r.item);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

}  // namespace internal

inline Histogram BuildHistogram(const RecordSet& rs) {
  std::map<std::string_view, int64_t, std::less<>> counts;
  for (const auto& [user, item] : internal::DistinctPairs(rs)) ++counts[item];
  Histogram h;
  for (const auto& [item, count] : counts) h.Set(std::string(item), count);
  return h;
}

// Number of distinct items per user.
class ContributionStats {
 public:
  explicit ContributionStats(const RecordSet& rs) {
    auto pairs = internal::DistinctPairs(rs);
    for (std::size_t i = 0; i < pairs.size();) {
      std::size_t j = i;
      while (j < pairs.size() && pairs[j].first == pairs[i].first) ++j;
      per_user_distinct_.emplace(std::string(pairs[i].first),
                                 static_cast<int64_t>(j - i));
      sorted_.push_back(static_cast<int64_t>(j - i));
      i = j;
    }
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t num_users() const { return sorted_.size(); }

  const std::map<std::string, int64_t, std::less<>>& per_user_distinct() const {
    return per_user_distinct_;
  }

  // Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.
  int64_t Percentile(double p) const {
    Require(p > 0 && p <= 100, "percentile must be in (0, 100]");
    Require(!sorted_.empty(), "percentile of an empty record set");
    auto n = static_cast<double>(sorted_.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, sorted_.size());
    return sorted_[rank - 1];
  }

 private:
  std::map<std::string, int64_t, std::less<>> per_user_distinct_;
  std::vector<int64_t> sorted_;
};

inline int64_t ContributionPercentile(const RecordSet& rs, double p) {
  Require(!rs.empty(), "percentile of an empty record set");
  return ContributionStats(rs).Percentile(p);
}

// ---------------------------------------------------------------------------
// Ingestion

enum class RecordFormat { kPairsCsv, kUserTextCsv };

inline RecordFormat ParseRecordFormat(std::string_view name) {
  if (name == "pairs_csv") return RecordFormat::kPairsCsv;
  if (name == "user_text_csv") return RecordFormat::kUserTextCsv;
  throw InvalidArgument("unknown record format '" + std::string(name) +
                        "' (expected pairs_csv or user_text_csv)");
}

struct LoadOptions {
  RecordFormat format = RecordFormat::kPairsCsv;
  // Empty means "use the 0-based data row index as the user id".
  std::string user_column = "user_id";
  // Item column for pairs_csv.
  std::string item_column = "item";
  // Free-text column for user_text_csv.
  std::string text_column = "text";
};

// Rows whose user or item field is empty are skipped. A source that yields no
// records at all is an error.
inline RecordSet LoadRecords(std::istream& in, const LoadOptions& options,
                             std::string_view source_name = "<stream>") {
  const std::string source(source_name);
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.Next(header)) throw IoError(source + ": empty file");

  long user_index = -1;
  if (!options.user_column.empty()) {
    user_index = csv::ColumnIndex(header, options.user_column);
    if (user_index < 0) {
      throw IoError(source + ": missing column '" + options.user_column + "'");
    }
  }
  const std::string& value_column = options.format == RecordFormat::kPairsCsv
                                        ? options.item_column
                                        : options.text_column;
  long value_index = csv::ColumnIndex(header, value_column);
  if (value_index < 0) {
    throw IoError(source + ": missing column '" + value_column + "'");
  }
  const auto needed = static_cast<std::size_t>(std::max(user_index, value_index));

  RecordSet rs;
  std::vector<std::string> row;
  uint64_t row_index = 0;
  while (reader.Next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() <= needed) {
      throw IoError(source + ": line " + std::to_string(reader.line()) +
                    " has " + std::to_string(row.size()) + " fields");
    }
    std::string user = user_index >= 0 ? row[static_cast<std::size_t>(user_index)]
                                       : std::to_string(row_index);
    ++row_index;
    if (user.empty()) continue;
    const std::string& value = row[static_cast<std::size_t>(value_index)];
    if (options.format == RecordFormat::kPairsCsv) {
      if (!value.empty()) rs.Add(std::move(user), value);
    } else {
      for (auto& token : Tokenize(value)) rs.Add(user, std::move(token));
    }
  }
  if (rs.empty()) throw IoError(source + ": no records");
  return rs;
}

inline RecordSet LoadRecords(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return LoadRecords(in, options, path);
}

// Cached histogram: `item,count`, release order.
inline void WriteHistogramCsv(const Histogram& h, std::ostream& out) {
  out << "item,count\n";
  for (const auto& e : h.SortedEntries()) {
    std::string count = std::to_string(e.count);
    csv::WriteRow(out, {e.item, count});
  }
}

inline Histogram ReadHistogramCsv(std::istream& in,
                                  std::string_view source_name = "<stream>") {
  const std::string source(source_name);
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.Next(row)) throw IoError(source + ": empty file");
  long item_index = csv::ColumnIndex(row, "item");
  long count_index = csv::ColumnIndex(row, "count");
  if (item_index < 0 || count_index < 0) {
    throw IoError(source + ": expected header 'item,count'");
  }
  Histogram h;
  while (reader.Next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() < 2) {
      throw IoError(source + ": line " + std::to_string(reader.line()) +
                    " is malformed");
    }
    auto count = ParseInt(row[static_cast<std::size_t>(count_index)]);
    const std::string& item = row[static_cast<std::size_t>(item_index)];
    if (!count || *count < 1 || item.empty()) {
      throw IoError(source + ": line " + std::to_string(reader.line()) +
                    " has an invalid item or count");
    }
    if (h.contains(item)) {
      throw IoError(source + ": duplicate item '" + item + "'");
    }
    h.Set(item, *count);
  }
  return h;
}

inline Histogram ReadHistogramCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadHistogramCsv(in, path);
}

}  // namespace pcr
