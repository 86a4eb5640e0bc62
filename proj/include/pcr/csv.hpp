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

// Minimal RFC 4180 reader and writer. Quoted fields may contain commas,
// doubled quotes and line breaks.

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pcr/common.hpp"

namespace pcr::csv {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Reads the next record into `fields`. Returns false at end of input.
  bool Next(std::vector<std::string>& fields) {
    fields.clear();
    if (in_.peek() == std::char_traits<char>::eof()) return false;
    ++line_;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;;) {
      int c = in_.get();
      if (c == std::char_traits<char>::eof()) {
        if (quoted) throw IoError("unterminated quoted field at line " +
                                  std::to_string(line_));
        fields.push_back(std::move(field));
        return true;
      }
      char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      if (ch == '"' && !field_started) {
        quoted = true;
        field_started = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
      } else if (ch == '\n') {
        fields.push_back(std::move(field));
        return true;
      } else if (ch == '\r') {
        if (in_.peek() == '\n') in_.get();
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(ch);
        field_started = true;
      }
    }
  }

  // Physical line on which the most recently returned record ended.
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

inline void WriteField(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

inline void WriteRow(std::ostream& out,
                     const std::vector<std::string_view>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    WriteField(out, fields[i]);
  }
  out << '\n';
}

// Index of `name` in a header row, or -1.
inline long ColumnIndex(const std::vector<std::string>& header,
                        std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string_view h = header[i];
    // Tolerate a UTF-8 byte order mark on the first column.
    if (i == 0 && h.substr(0, 3) == "\xEF\xBB\xBF") h.remove_prefix(3);
    if (h == name) return static_cast<long>(i);
  }
  return -1;
}

}  // namespace pcr::csv
