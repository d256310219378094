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

#ifndef GENEBENCH_TEXT_HPP_
#define GENEBENCH_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Text helpers shared by the graders, the tokenizer and the post-processor.
namespace genebench::text {

// Half-open byte range [begin, end) into a UTF-8 string.
struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const ByteSpan&) const = default;
};

std::string_view trim(std::string_view s);
std::string ascii_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool is_ascii_space(char c);

// Runs of Unicode whitespace become one ASCII space; leading and trailing
// whitespace is dropped.
std::string collapse_whitespace(std::string_view s);

// Lowercased and whitespace-collapsed code points. This is the canonical form
// for every case-insensitive comparison in the graders.
std::u32string fold(std::string_view s);

// True if `needle` occurs in `haystack` under fold() with no word character
// immediately on either side.
bool contains_word_phrase(std::string_view haystack, std::string_view needle);

// Natural order for sample ids: all-digit ids compare numerically and sort
// before other ids, which compare bytewise.
bool id_less(std::string_view a, std::string_view b);

// Sentence boundaries: a run of . ! ? (plus closing quotes or brackets)
// followed by whitespace or end of text, skipping common abbreviations. A
// blank line also closes a sentence. Spans exclude surrounding whitespace.
std::vector<ByteSpan> sentence_spans(std::string_view s);

}  // namespace genebench::text

#endif  // GENEBENCH_TEXT_HPP_
