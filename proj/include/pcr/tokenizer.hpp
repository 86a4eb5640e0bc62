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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pcr {

namespace tokenizer_internal {

// Byte length of a Unicode whitespace sequence starting at `pos`, or 0.
// Covers ASCII whitespace and the White_Space code points outside ASCII.
inline std::size_t WhitespaceLength(std::string_view s, std::size_t pos) {
  auto byte = [&](std::size_t i) -> uint8_t {
    return i < s.size() ? static_cast<uint8_t>(s[i]) : 0;
  };
  uint8_t b0 = byte(pos);
  if (b0 == ' ' || (b0 >= 0x09 && b0 <= 0x0D)) return 1;
  uint8_t b1 = byte(pos + 1);
  uint8_t b2 = byte(pos + 2);
  // U+0085, U+00A0
  if (b0 == 0xC2 && (b1 == 0x85 || b1 == 0xA0)) return 2;
  // U+1680
  if (b0 == 0xE1 && b1 == 0x9A && b2 == 0x80) return 3;
  if (b0 == 0xE2 && b1 == 0x80) {
    // U+2000..U+200A, U+2028, U+2029, U+202F
    if ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xA8 || b2 == 0xA9 || b2 == 0xAF) {
      return 3;
    }
  }
  // U+205F
  if (b0 == 0xE2 && b1 == 0x81 && b2 == 0x9F) return 3;
  // U+3000
  if (b0 == 0xE3 && b1 == 0x80 && b2 == 0x80) return 3;
  return 0;
}

inline bool IsAsciiPunct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

}  // namespace tokenizer_internal

// Lowercases ASCII letters, splits on Unicode whitespace and strips leading
// and trailing ASCII punctuation from each token. Tokens that become empty are
// dropped. Non-ASCII bytes pass through unchanged.
inline std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    std::size_t begin = 0;
    std::size_t end = current.size();
    while (begin < end && tokenizer_internal::IsAsciiPunct(current[begin])) {
      ++begin;
    }
    while (end > begin && tokenizer_internal::IsAsciiPunct(current[end - 1])) {
      --end;
    }
    if (end > begin) tokens.emplace_back(current.substr(begin, end - begin));
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t ws = tokenizer_internal::WhitespaceLength(text, pos);
    if (ws > 0) {
      flush();
      pos += ws;
      continue;
    }
    char c = text[pos];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    current.push_back(c);
    ++pos;
  }
  flush();
  return tokens;
}

}  // namespace pcr
