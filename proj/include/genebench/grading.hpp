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

#ifndef GENEBENCH_GRADING_HPP_
#define GENEBENCH_GRADING_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "genebench/types.hpp"

namespace genebench::grading {

// ---------------------------------------------------------------------------
// Structural rules

struct SingleParagraph {
  bool operator==(const SingleParagraph&) const = default;
};
struct SentenceCountRange {
  std::size_t min = 1;
  std::size_t max = 1;
  bool operator==(const SentenceCountRange&) const = default;
};
struct StartsWithToken {
  std::string token;
  bool operator==(const StartsWithToken&) const = default;
};
struct NoListMarkers {
  bool operator==(const NoListMarkers&) const = default;
};
struct MaxChars {
  std::size_t n = 0;
  bool operator==(const MaxChars&) const = default;
};
struct ContainsSection {
  std::string tag;
  bool operator==(const ContainsSection&) const = default;
};

using StructuralRule = std::variant<SingleParagraph, SentenceCountRange, StartsWithToken,
                                    NoListMarkers, MaxChars, ContainsSection>;

bool check_rule(const StructuralRule& rule, std::string_view output);
std::string describe(const StructuralRule& rule);

// Ordered, non-empty list of structural rules.
//
// Text form, one rule per line ('#' starts a comment):
//
//   single_paragraph
//   sentence_count_range 1 6
//   starts_with_token {gene}
//   no_list_markers
//   max_chars 1500
//   contains_section Summary
//
// "{gene}" in a token or tag is replaced by bind().
class PromptSpec {
 public:
  explicit PromptSpec(std::vector<StructuralRule> rules);

  static PromptSpec parse(std::string_view text);
  static PromptSpec load(const std::string& path);

  const std::vector<StructuralRule>& rules() const { return rules_; }
  PromptSpec bind(std::string_view gene) const;
  std::string to_text() const;

 private:
  std::vector<StructuralRule> rules_;
};

// 1 iff the (non-blank) output passes every rule. A blank output never
// satisfies a prompt.
int grade_structural(std::string_view output, const PromptSpec& spec);

// ---------------------------------------------------------------------------
// Factual graders

enum class ProteinScorer { kSubstring, kSubsequence };

struct GraderConfig {
  double function_recall_threshold = 0.3;
  ProteinScorer protein_scorer = ProteinScorer::kSubstring;
};

struct GeneFactual {
  int score = 0;
  bool name_matched = false;
  std::string matched_name;
  std::size_t matched_words = 0;
  std::size_t gold_words = 0;
  double recall = 0.0;
};

// Name condition: the symbol, the full name or any alias occurs in the
// output as a whole-word phrase, case-insensitively. Function condition:
// clipped content-word unigram recall of the gold summary (stopwords removed)
// is at least the configured threshold (inclusive).
GeneFactual grade_gene_factual_detail(std::string_view output, const GeneRecord& gold,
                                      const GraderConfig& cfg = {});
int grade_gene_factual(std::string_view output, const GeneRecord& gold,
                       const GraderConfig& cfg = {});

struct CommonSubstring {
  std::size_t length = 0;  // code points
  std::string text;        // normalized form, UTF-8
};

// Longest contiguous common run after lowercasing and whitespace collapsing.
// Ties go to the earliest start in `a`.
CommonSubstring longest_common_substring(std::string_view a, std::string_view b);

// Same normalization; length of the longest common subsequence.
std::size_t longest_common_subsequence(std::string_view a, std::string_view b);

// LCS length over normalized gold length, in [0, 1].
double grade_protein_factual(std::string_view output, std::string_view gold_name,
                             ProteinScorer scorer = ProteinScorer::kSubstring);

enum class Stance { kYes, kNo, kUnparseable };

// An "answer: yes" style field anywhere on its own line wins; otherwise the
// first token of the output decides (yes/no/true/false).
Stance parse_stance(std::string_view output);

struct MarkerGrade {
  int score = 0;
  bool unparseable = false;
};

MarkerGrade grade_marker(std::string_view output, const MarkerRelation& gold);

// ---------------------------------------------------------------------------
// Samples and aggregation

using Gold = std::variant<GeneRecord, std::string, MarkerRelation>;

struct EvalSample {
  std::string id;
  Task task = Task::kGeneDescription;
  std::string prompt;
  std::string output;
  Gold gold;

  // Throws kParse if the gold variant does not match the task.
  void validate() const;
};

struct SampleScore {
  std::string id;
  double factual = 0.0;
  int structural = 0;
  bool unparseable = false;
};

SampleScore grade_sample(const EvalSample& sample, const PromptSpec& spec,
                         const GraderConfig& cfg = {});

struct GradeReport {
  std::vector<SampleScore> per_sample;
  double factual_mean = 0.0;
  double structural_mean = 0.0;
  double average = 0.0;
  std::size_t unparseable = 0;
};

// Means are taken over the sorted column, so any permutation of the input
// produces bit-identical means. Throws kEmptyList.
GradeReport aggregate(std::vector<SampleScore> per_sample);

}  // namespace genebench::grading

#endif  // GENEBENCH_GRADING_HPP_
