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

#include "genebench/postprocess.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "genebench/error.hpp"

namespace genebench::postprocess {

namespace {

constexpr std::size_t npos = std::string_view::npos;

bool is_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return text::is_ascii_space(c); }

bool imatch_at(std::string_view s, std::size_t pos, std::string_view word) {
  return pos <= s.size() && s.size() - pos >= word.size() &&
         text::iequals(s.substr(pos, word.size()), word);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

// Longest first so "aliases include" wins over "aliases".
constexpr std::array<std::string_view, 16> kIntros = {
    "alternative symbols include", "alternative names include", "other aliases include",
    "known by the aliases",        "other names include",       "also referred to as",
    "otherwise known as",          "aliases include",           "also known as",
    "also called",                 "aliases are",               "alias is",
    "aliases",                     "a.k.a.",                    "alias",
    "aka"};

constexpr std::string_view kCanonicalAliasPrefix = "Its aliases include ";
constexpr std::string_view kCanonicalIdPrefix = "Its Ensembl ID is ";

// End of an alias-looking token starting at pos, or npos.
std::size_t parse_alias_token(std::string_view s, std::size_t pos) {
  if (pos >= s.size() || !is_alnum(s[pos])) return npos;
  if (pos > 0 && is_alnum(s[pos - 1])) return npos;
  std::size_t i = pos;
  while (i < s.size() && (is_alnum(s[i]) || s[i] == '.' || s[i] == '-' || s[i] == '_')) ++i;
  while (i > pos && (s[i - 1] == '.' || s[i - 1] == '-')) --i;
  const std::string_view tok = s.substr(pos, i - pos);
  // Identifiers are the ID step's business, never alias text.
  if (tok.size() > 4 && tok.substr(0, 4) == "ENSG" && all_digits(tok.substr(4))) return npos;
  if (tok == "HGNC" && i < s.size() && s[i] == ':') return npos;
  const bool symbol_like = std::any_of(tok.begin(), tok.end(), [](char c) {
    return is_digit(c) || (c >= 'A' && c <= 'Z');
  });
  return symbol_like ? i : npos;
}

std::size_t parse_alias_list(std::string_view s, std::size_t pos) {
  static constexpr std::array<std::string_view, 8> kSeparators = {
      ", and ", ", or ", " and ", " or ", ", ", "; ", "/", ","};
  std::size_t end = parse_alias_token(s, pos);
  if (end == npos) return npos;
  bool extended = true;
  while (extended) {
    extended = false;
    for (std::string_view sep : kSeparators) {
      if (!imatch_at(s, end, sep)) continue;
      const std::size_t next = parse_alias_token(s, end + sep.size());
      if (next != npos) {
        end = next;
        extended = true;
        break;
      }
    }
  }
  return end;
}

// Intro at pos (word-bounded), then optional ':' and the required gap.
// Returns the position of the first list character, or npos.
std::size_t parse_intro(std::string_view s, std::size_t pos) {
  if (pos > 0 && is_alnum(s[pos - 1])) return npos;
  for (std::string_view intro : kIntros) {
    if (!imatch_at(s, pos, intro)) continue;
    std::size_t i = pos + intro.size();
    if (i < s.size() && is_alnum(s[i])) continue;
    std::size_t j = i;
    while (j < s.size() && s[j] == ' ') ++j;
    if (j < s.size() && s[j] == ':') ++j;
    while (j < s.size() && s[j] == ' ') ++j;
    if (j == i) continue;
    return j;
  }
  return npos;
}

// intro + list, optionally repeated (", also known as X1, also known as X1").
std::size_t match_alias_run(std::string_view s, std::size_t pos) {
  std::size_t list = parse_intro(s, pos);
  if (list == npos) return npos;
  std::size_t end = parse_alias_list(s, list);
  if (end == npos) return npos;
  while (true) {
    std::size_t j = end;
    if (j < s.size() && (s[j] == ',' || s[j] == ';')) ++j;
    while (j < s.size() && s[j] == ' ') ++j;
    if (j == end) break;
    const std::size_t next_list = parse_intro(s, j);
    if (next_list == npos) break;
    const std::size_t next_end = parse_alias_list(s, next_list);
    if (next_end == npos) break;
    end = next_end;
  }
  return end;
}

std::size_t core_end(std::string_view s, text::ByteSpan span) {
  std::size_t e = span.end;
  while (e > span.begin && (s[e - 1] == '.' || s[e - 1] == '!' || s[e - 1] == '?' ||
                            s[e - 1] == ')' || s[e - 1] == '"')) {
    --e;
  }
  return e;
}

bool is_alias_sentence(std::string_view s, text::ByteSpan span) {
  if (imatch_at(s, span.begin, kCanonicalAliasPrefix)) return true;
  const std::size_t end = core_end(s, span);
  std::size_t p = span.begin;
  for (int words = 0; words <= 6 && p < end; ++words) {
    if (match_alias_run(s, p) == end) return true;
    // A comma ends the subject; ", also known as ..." is a clause, and the
    // sentence around it stays.
    while (p < end && !is_space(s[p])) {
      if (s[p] == ',') return false;
      ++p;
    }
    while (p < end && is_space(s[p])) ++p;
  }
  return false;
}

bool overlaps(const std::vector<text::ByteSpan>& taken, text::ByteSpan r) {
  return std::any_of(taken.begin(), taken.end(), [&](const text::ByteSpan& t) {
    return r.begin < t.end && t.begin < r.end;
  });
}

bool preceded_by_gene(std::string_view s, std::size_t open, std::string_view gene) {
  if (gene.empty()) return false;
  std::size_t e = open;
  if (e > 0 && s[e - 1] == ' ') --e;
  if (e < gene.size() || !text::iequals(s.substr(e - gene.size(), gene.size()), gene)) {
    return false;
  }
  const std::size_t b = e - gene.size();
  return b == 0 || !is_alnum(s[b - 1]);
}

bool is_clause_stop(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return true;
  const char c = s[pos];
  return c == ',' || c == ';' || c == '.' || c == ')' || c == '!' || c == '?';
}

std::string apply_removals(std::string_view s, const std::vector<text::ByteSpan>& regions,
                           ChangeLog* log) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& r : regions) {
    out.append(s.substr(cursor, r.begin - cursor));
    if (log) {
      log->push_back({"alias_remove", r.begin, r.end, std::string(s.substr(r.begin, r.size())), ""});
    }
    cursor = r.end;
  }
  out.append(s.substr(cursor));
  return out;
}

}  // namespace

bool is_valid_ensembl_id(std::string_view id) {
  return id.size() == 15 && id.substr(0, 4) == "ENSG" && all_digits(id.substr(4));
}

bool is_valid_hgnc_id(std::string_view id) {
  return id.size() >= 6 && id.size() <= 11 && id.substr(0, 5) == "HGNC:" &&
         all_digits(id.substr(5));
}

void GeneIdDatabase::add(std::string symbol, GeneIds ids) {
  if (symbol.empty()) fail(ErrorKind::kParse, "gene id database: empty symbol");
  if (!is_valid_ensembl_id(ids.ensembl_id)) {
    fail(ErrorKind::kParse, "gene id database: bad Ensembl ID '" + ids.ensembl_id + "' for " + symbol);
  }
  if (!is_valid_hgnc_id(ids.hgnc_id)) {
    fail(ErrorKind::kParse, "gene id database: bad HGNC ID '" + ids.hgnc_id + "' for " + symbol);
  }
  if (entries_.count(symbol)) fail(ErrorKind::kParse, "gene id database: duplicate symbol " + symbol);
  entries_.emplace(std::move(symbol), std::move(ids));
}

GeneIdDatabase GeneIdDatabase::parse(std::string_view tsv) {
  GeneIdDatabase db;
  std::size_t line_no = 0;
  for (const std::string& raw : text::split(tsv, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#' || line.rfind("symbol\t", 0) == 0) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 3 || cols.size() > 4) {
      fail(ErrorKind::kParse, "gene id database line " + std::to_string(line_no) +
                                  ": expected 3 or 4 tab-separated columns");
    }
    GeneIds ids{cols[1], cols[2], {}};
    if (cols.size() == 4) {
      for (const auto& a : text::split(cols[3], ',')) {
        const std::string alias(text::trim(a));
        if (!alias.empty()) ids.aliases.push_back(alias);
      }
    }
    db.add(std::string(text::trim(cols[0])), std::move(ids));
  }
  return db;
}

GeneIdDatabase GeneIdDatabase::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open gene id database " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const GeneIds* GeneIdDatabase::find(std::string_view symbol) const {
  auto it = entries_.find(symbol);
  return it == entries_.end() ? nullptr : &it->second;
}

const GeneIds& GeneIdDatabase::at(std::string_view symbol) const {
  const GeneIds* ids = find(symbol);
  if (!ids) fail(ErrorKind::kGeneNotInDb, "gene " + std::string(symbol) + " is not in the database");
  return *ids;
}

std::vector<IdSpan> detect_id_spans(std::string_view s) {
  std::vector<IdSpan> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    IdKind kind;
    std::size_t digits_at;
    if (s.compare(i, 4, "ENSG") == 0) {
      kind = IdKind::kEnsembl;
      digits_at = i + 4;
    } else if (s.compare(i, 5, "HGNC:") == 0) {
      kind = IdKind::kHgnc;
      digits_at = i + 5;
    } else {
      ++i;
      continue;
    }
    std::size_t end = digits_at;
    while (end < s.size() && is_digit(s[end])) ++end;
    const bool left_ok = i == 0 || !is_alnum(s[i - 1]);
    const bool right_ok = end == s.size() || !is_alnum(s[end]);
    if (end > digits_at && left_ok && right_ok) {
      spans.push_back({i, end, kind, std::string(s.substr(i, end - i))});
      i = end;
    } else {
      ++i;
    }
  }
  return spans;
}

std::string canonical_id_sentence(const GeneIds& ids) {
  return std::string(kCanonicalIdPrefix) + ids.ensembl_id + " and its HGNC ID is " +
         ids.hgnc_id + ".";
}

std::string canonical_alias_clause(const std::vector<std::string>& aliases) {
  return std::string(kCanonicalAliasPrefix) + text::join(aliases, ", ") + ".";
}

std::string correct_numeric_ids(std::string_view s, std::string_view gene,
                                const GeneIdDatabase& db, const IdOptions& options,
                                ChangeLog* log) {
  const GeneIds& ids = db.at(gene);
  const auto spans = detect_id_spans(s);
  std::string out;
  if (spans.empty()) {
    out = std::string(s);
    if (!options.append_when_missing) return out;
    // Trailing whitespace stays at the very end.
    std::size_t core = s.size();
    while (core > 0 && is_space(s[core - 1])) --core;
    std::string addition;
    if (core > 0) {
      const char last = s[core - 1];
      if (last != '.' && last != '!' && last != '?') addition += '.';
      addition += ' ';
    }
    addition += canonical_id_sentence(ids);
    out.insert(core, addition);
    if (log) log->push_back({"append", core, core, "", addition});
    return out;
  }
  std::size_t cursor = 0;
  for (const auto& span : spans) {
    out.append(s.substr(cursor, span.start - cursor));
    const std::string& truth = span.kind == IdKind::kEnsembl ? ids.ensembl_id : ids.hgnc_id;
    out += truth;
    if (log && span.text != truth) {
      log->push_back({span.kind == IdKind::kEnsembl ? "ensembl" : "hgnc", span.start, span.end,
                      span.text, truth});
    }
    cursor = span.end;
  }
  out.append(s.substr(cursor));
  return out;
}

std::vector<text::ByteSpan> alias_mentions(std::string_view s, std::string_view gene) {
  std::vector<text::ByteSpan> regions;

  // Whole sentences. Whitespace on one side goes with the sentence so the
  // remaining text joins cleanly.
  const auto sentences = text::sentence_spans(s);
  bool nothing_kept = true;
  std::size_t kept_end = 0;
  for (const auto& span : sentences) {
    if (!is_alias_sentence(s, span)) {
      nothing_kept = false;
      kept_end = span.end;
      continue;
    }
    if (nothing_kept) {
      std::size_t e = span.end;
      while (e < s.size() && is_space(s[e])) ++e;
      regions.push_back({span.begin, e});
    } else {
      regions.push_back({kept_end, span.end});
      kept_end = span.end;
    }
  }

  // Parentheticals.
  for (std::size_t open = s.find('('); open != npos; open = s.find('(', open + 1)) {
    const std::size_t close = s.find(')', open);
    if (close == npos) break;
    if (s.substr(open + 1, close - open - 1).find('(') != npos) continue;
    std::size_t ib = open + 1;
    std::size_t ie = close;
    while (ib < ie && is_space(s[ib])) ++ib;
    while (ie > ib && is_space(s[ie - 1])) --ie;
    if (ib == ie) continue;
    const bool intro_form = match_alias_run(s, ib) == ie;
    const bool bare_form = !intro_form && preceded_by_gene(s, open, gene) &&
                           parse_alias_list(s, ib) == ie;
    if (!intro_form && !bare_form) continue;
    std::size_t b = open;
    while (b > 0 && s[b - 1] == ' ') --b;
    const text::ByteSpan r{b, close + 1};
    if (!overlaps(regions, r)) regions.push_back(r);
  }

  // Comma clauses.
  for (std::size_t comma = s.find(','); comma != npos; comma = s.find(',', comma + 1)) {
    std::size_t j = comma + 1;
    while (j < s.size() && s[j] == ' ') ++j;
    if (j == comma + 1) continue;
    const std::size_t end = match_alias_run(s, j);
    if (end == npos || !is_clause_stop(s, end)) continue;
    text::ByteSpan r{comma, end};
    if (end < s.size() && s[end] == ',') r.end = end + 1;
    if (!overlaps(regions, r)) regions.push_back(r);
  }

  std::sort(regions.begin(), regions.end(),
            [](const text::ByteSpan& a, const text::ByteSpan& b) { return a.begin < b.begin; });
  return regions;
}

std::string normalize_aliases(std::string_view s, std::string_view gene,
                              const GeneIdDatabase& db, ChangeLog* log) {
  const GeneIds& ids = db.at(gene);
  std::string current(s);
  // Deleting one mention can expose another (e.g. a parenthetical that now
  // touches the gene symbol), so run to a fixed point.
  for (auto regions = alias_mentions(current, gene); !regions.empty();
       regions = alias_mentions(current, gene)) {
    current = apply_removals(current, regions, log);
  }
  if (ids.aliases.empty()) return current;

  const std::string clause = canonical_alias_clause(ids.aliases);
  const auto sentences = text::sentence_spans(current);
  if (sentences.empty()) {
    if (log) log->push_back({"alias_insert", 0, 0, current, clause});
    return clause;
  }
  const auto& first = sentences.front();
  std::size_t at;
  std::string insertion;
  if (imatch_at(current, first.begin, kCanonicalIdPrefix)) {
    at = first.begin;
    insertion = clause + " ";
  } else {
    at = first.end;
    insertion = " " + clause;
  }
  current.insert(at, insertion);
  if (log) log->push_back({"alias_insert", at, at, "", insertion});
  return current;
}

}  // namespace genebench::postprocess
