// Copyright 2026 The genebench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GENEBENCH_UNICODE_HPP_
#define GENEBENCH_UNICODE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 and character-class support for the tokenizer and the
// normalizing matchers. Tables are generated from the Unicode database by
// tools/gen_unicode_tables.py so that tokenization is reproducible without
// depending on the host locale.
namespace genebench::unicode {

struct CodepointRange {
  char32_t first;
  char32_t last;
};

struct LowerMapping {
  char32_t upper;
  char32_t lower;
};

namespace detail {
extern const CodepointRange kPunctuation[];
extern const CodepointRange kWhitespace[];
extern const LowerMapping kLowercase[];
extern const std::size_t kPunctuationSize;
extern const std::size_t kWhitespaceSize;
extern const std::size_t kLowercaseSize;
extern const char kUnicodeVersion[];
}  // namespace detail

// Invalid sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

// General category P* (all punctuation classes).
bool is_punctuation(char32_t cp);
// Z* separators plus the ASCII/C1 whitespace controls.
bool is_whitespace(char32_t cp);
// Simple (1:1) lowercase mapping.
char32_t to_lower(char32_t cp);

std::string_view table_version();

}  // namespace genebench::unicode

#endif  // GENEBENCH_UNICODE_HPP_
