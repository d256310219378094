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

#ifndef GENEBENCH_POSTPROCESS_HPP_
#define GENEBENCH_POSTPROCESS_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "genebench/text.hpp"

// Database-backed repair of model outputs: hallucinated Ensembl/HGNC IDs are
// overwritten with the database values, and alias passages are replaced by a
// single canonical alias clause.
namespace genebench::postprocess {

struct GeneIds {
  std::string ensembl_id;
  std::string hgnc_id;
  std::vector<std::string> aliases;
};

bool is_valid_ensembl_id(std::string_view id);  // "ENSG" + 11 digits
bool is_valid_hgnc_id(std::string_view id);     // "HGNC:" + 1..6 digits

// Immutable after load; safe to share across threads.
//
// File format: tab-separated symbol, Ensembl ID, HGNC ID, comma-joined
// aliases (may be empty). Blank lines, lines starting with '#', and a header
// line starting with "symbol" are skipped.
class GeneIdDatabase {
 public:
  static GeneIdDatabase parse(std::string_view tsv);
  static GeneIdDatabase load(const std::string& path);

  // Throws kParse on malformed IDs or a duplicate symbol.
  void add(std::string symbol, GeneIds ids);

  const GeneIds* find(std::string_view symbol) const;
  // Throws kGeneNotInDb.
  const GeneIds& at(std::string_view symbol) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, GeneIds, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, GeneIds, std::less<>> entries_;
};

enum class IdKind { kEnsembl, kHgnc };

struct IdSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  IdKind kind = IdKind::kEnsembl;
  std::string text;
};

// Non-overlapping "ENSG<digits>" and "HGNC:<digits>" tokens, left to right.
// Any digit count is accepted so malformed hallucinations get repaired too;
// the token must not touch a letter or digit on either side.
std::vector<IdSpan> detect_id_spans(std::string_view text);

struct Change {
  std::string kind;  // ensembl, hgnc, append, alias_remove, alias_insert
  std::size_t start = 0;  // offset in the text the step operated on
  std::size_t end = 0;
  std::string before;
  std::string after;
};
using ChangeLog = std::vector<Change>;

struct IdOptions {
  // When the output names no ID at all, append canonical_id_sentence().
  bool append_when_missing = true;
};

std::string canonical_id_sentence(const GeneIds& ids);
std::string canonical_alias_clause(const std::vector<std::string>& aliases);

std::string correct_numeric_ids(std::string_view text, std::string_view gene,
                                const GeneIdDatabase& db, const IdOptions& options = {},
                                ChangeLog* log = nullptr);

// Regions the alias normalizer deletes, in order. Recognized forms (all
// case-insensitive):
//
//   * whole sentences made of an optional short subject (up to six words), an
//     alias intro and an alias list, e.g. "It is also known as P53, LFS1." or
//     "Aliases include BCC7."; any sentence starting "Its aliases include";
//   * parentheticals holding an intro plus list, e.g. "(also known as GLI)",
//     or a bare symbol list directly after the gene symbol, "GLI1 (GLI, GLI-1)";
//   * comma clauses ", also known as X, Y" (repeats chained), which must end
//     at punctuation or end of text.
//
// Intros: also known as, also called, also referred to as, otherwise known as,
// aka, a.k.a., alias, aliases, aliases include, aliases are, alias is,
// other aliases include, known by the aliases, other names include,
// alternative names include, alternative symbols include.
// Alias list items must look like symbols (contain an upper-case letter or a
// digit); prose is never deleted.
std::vector<text::ByteSpan> alias_mentions(std::string_view text, std::string_view gene);

// Deletes alias_mentions() and inserts canonical_alias_clause() right after
// the first sentence (before it, when the first sentence is the canonical ID
// sentence). Nothing is inserted when the database lists no aliases.
std::string normalize_aliases(std::string_view text, std::string_view gene,
                              const GeneIdDatabase& db, ChangeLog* log = nullptr);

}  // namespace genebench::postprocess

#endif  // GENEBENCH_POSTPROCESS_HPP_
