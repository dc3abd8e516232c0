/*
 * Copyright 2026 The tiger-eval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace tiger {

struct TokenizedCaption {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  friend bool operator==(const TokenizedCaption&, const TokenizedCaption&) = default;
};

// ASCII-lowercases, turns punctuation into separators (an apostrophe is kept
// only between two alphanumerics, as in "man's"), and splits on whitespace.
// Bytes >= 0x80 are treated as word characters so UTF-8 text survives intact.
inline TokenizedCaption tokenize(std::string_view text) {
  auto is_word = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
  TokenizedCaption out;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
      continue;
    }
    if (c == '\'' && !current.empty() && i + 1 < text.size() &&
        is_word(static_cast<unsigned char>(text[i + 1]))) {
      current.push_back('\'');
      continue;
    }
    if (!current.empty()) {
      out.tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

}  // namespace tiger
