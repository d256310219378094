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

#include "genebench/text.hpp"

#include <algorithm>
#include <array>

#include "genebench/unicode.hpp"

namespace genebench::text {

namespace {

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z') || cp == '_';
  }
  return !unicode::is_punctuation(cp) && !unicode::is_whitespace(cp);
}

constexpr std::array<std::string_view, 14> kAbbreviations = {
    "e.g.", "i.e.", "etc.", "vs.", "al.", "approx.", "fig.",
    "no.",  "dr.",  "mr.",  "ms.", "st.", "ca.",     "cf."};

bool ends_with_abbreviation(std::string_view s, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_ascii_space(s[start - 1]) && s[start - 1] != '(') {
    --start;
  }
  const std::string word = ascii_lower(s.substr(start, dot + 1 - start));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

bool is_closer(char c) {
  return c == ')' || c == ']' || c == '"' || c == '\'';
}

}  // namespace

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_ascii_space(s[b])) ++b;
  while (e > b && is_ascii_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && ascii_lower(a) == ascii_lower(b);
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  const std::u32string cps = unicode::decode(s);
  std::string out;
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (unicode::is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    unicode::append_utf8(out, cp);
  }
  return out;
}

std::u32string fold(std::string_view s) {
  const std::u32string cps = unicode::decode(s);
  std::u32string out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (unicode::is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(unicode::to_lower(cp));
  }
  return out;
}

bool contains_word_phrase(std::string_view haystack, std::string_view needle) {
  const std::u32string h = fold(haystack);
  const std::u32string n = fold(needle);
  if (n.empty()) return false;
  std::size_t pos = h.find(n);
  while (pos != std::u32string::npos) {
    const bool left_ok = pos == 0 || !is_word_char(h[pos - 1]) || !is_word_char(n.front());
    const std::size_t after = pos + n.size();
    const bool right_ok =
        after == h.size() || !is_word_char(h[after]) || !is_word_char(n.back());
    if (left_ok && right_ok) return true;
    pos = h.find(n, pos + 1);
  }
  return false;
}

bool id_less(std::string_view a, std::string_view b) {
  auto numeric = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
  };
  const bool na = numeric(a);
  const bool nb = numeric(b);
  if (na && nb) {
    auto strip = [](std::string_view s) {
      const std::size_t p = s.find_first_not_of('0');
      return p == std::string_view::npos ? std::string_view{} : s.substr(p);
    };
    const std::string_view sa = strip(a);
    const std::string_view sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
    return a < b;
  }
  if (na != nb) return na;
  return a < b;
}

std::vector<ByteSpan> sentence_spans(std::string_view s) {
  std::vector<ByteSpan> spans;
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto skip_space = [&](std::size_t p) {
    while (p < n && is_ascii_space(s[p])) ++p;
    return p;
  };
  std::size_t start = skip_space(0);
  i = start;
  auto close = [&](std::size_t end) {
    std::size_t e = end;
    while (e > start && is_ascii_space(s[e - 1])) --e;
    if (e > start) spans.push_back({start, e});
    start = skip_space(end);
    i = start;
  };
  while (i < n) {
    const char c = s[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j < n && (s[j] == '.' || s[j] == '!' || s[j] == '?')) ++j;
      while (j < n && is_closer(s[j])) ++j;
      const bool at_boundary = j == n || is_ascii_space(s[j]);
      const bool abbreviation = c == '.' && j == i + 1 && ends_with_abbreviation(s, i);
      if (at_boundary && !abbreviation) {
        close(j);
        continue;
      }
      i = j;
      continue;
    }
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < n && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
      if (j < n && s[j] == '\n') {
        close(i);
        continue;
      }
    }
    ++i;
  }
  close(n);
  return spans;
}

}  // namespace genebench::text
