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

#ifndef GENEBENCH_TEXT_METRICS_HPP_
#define GENEBENCH_TEXT_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genebench::metrics {

// Bumped whenever tokenize() changes behavior; reports record it.
inline constexpr std::string_view kTokenizerVersion = "tok-v1";

struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const TokenSequence&) const = default;
};

// Lowercases, turns every Unicode punctuation character into a separator and
// splits on Unicode whitespace.
TokenSequence tokenize(std::string_view text);

struct NgramDetail {
  int n = 0;
  std::size_t matched = 0;  // clipped
  std::size_t total = 0;    // candidate n-grams for BLEU, reference for ROUGE
  double score = 0.0;       // precision (BLEU, after smoothing) or recall
  bool smoothed = false;
};

struct MetricResult {
  double value = 0.0;
  std::vector<NgramDetail> detail;
  double brevity_penalty = 1.0;
  bool empty_candidate = false;
};

// Single-reference BLEU: geometric mean of clipped n-gram precisions for
// n = 1..max_n times the brevity penalty exp(1 - |ref|/|cand|) when the
// candidate is shorter than the reference.
//
// A zero precision at n > 1 is smoothed to (0 + 1) / (total + 1), capped at
// the precision of order n - 1, so smoothing never ranks a higher order above
// the evidence of the lower one. A candidate with fewer than n tokens has no
// n-grams; its order-n precision carries the order n - 1 value. A zero
// unigram precision yields 0. An empty candidate yields 0 with
// empty_candidate set.
MetricResult bleu(const TokenSequence& candidate, const TokenSequence& reference,
                  int max_n = 4);

// Clipped k-gram recall of the reference. Throws kReferenceTooShort when the
// reference has fewer than k tokens.
MetricResult rouge_k_recall(const TokenSequence& candidate,
                            const TokenSequence& reference, int k = 1);

// Sample Pearson correlation. Throws kLengthMismatch (also for n < 2) and
// kConstantColumn.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct Correlation {
  double coefficient = 0.0;
  double p_value = 1.0;  // two-sided, Student t with n - 2 degrees of freedom
  std::size_t n = 0;
};

Correlation pearson_test(std::span<const double> xs, std::span<const double> ys);

}  // namespace genebench::metrics

#endif  // GENEBENCH_TEXT_METRICS_HPP_
