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

#include "genebench/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "genebench/error.hpp"
#include "genebench/unicode.hpp"

namespace genebench::metrics {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// Tokens never contain whitespace, so a unit separator cannot collide.
NgramCounts count_ngrams(const TokenSequence& seq, int n) {
  NgramCounts counts;
  const auto len = static_cast<std::ptrdiff_t>(seq.size());
  for (std::ptrdiff_t i = 0; i + n <= len; ++i) {
    std::string key = seq.tokens[static_cast<std::size_t>(i)];
    for (int j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += seq.tokens[static_cast<std::size_t>(i + j)];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t clipped_overlap(const NgramCounts& counted, const NgramCounts& against) {
  std::size_t matched = 0;
  for (const auto& [gram, count] : counted) {
    auto it = against.find(gram);
    if (it != against.end()) matched += std::min(count, it->second);
  }
  return matched;
}

std::size_t ngram_total(std::size_t len, int n) {
  const auto un = static_cast<std::size_t>(n);
  return len >= un ? len - un + 1 : 0;
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence out;
  std::string current;
  for (char32_t cp : unicode::decode(text)) {
    if (unicode::is_whitespace(cp) || unicode::is_punctuation(cp)) {
      if (!current.empty()) out.tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    unicode::append_utf8(current, unicode::to_lower(cp));
  }
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

MetricResult bleu(const TokenSequence& candidate, const TokenSequence& reference,
                  int max_n) {
  if (max_n < 1) fail(ErrorKind::kOutOfRange, "bleu: max_n must be >= 1");
  MetricResult result;
  if (candidate.empty()) {
    result.empty_candidate = true;
    return result;
  }
  double log_sum = 0.0;
  double previous = 1.0;
  for (int n = 1; n <= max_n; ++n) {
    NgramDetail d;
    d.n = n;
    d.total = ngram_total(candidate.size(), n);
    d.matched = d.total == 0 ? 0
                             : clipped_overlap(count_ngrams(candidate, n),
                                               count_ngrams(reference, n));
    if (d.matched > 0) {
      d.score = static_cast<double>(d.matched) / static_cast<double>(d.total);
    } else if (n == 1) {
      d.score = 0.0;
    } else {
      d.smoothed = true;
      d.score = std::min(1.0 / static_cast<double>(d.total + 1), previous);
    }
    previous = d.score;
    result.detail.push_back(d);
    if (d.score == 0.0) {
      result.value = 0.0;
      return result;
    }
    log_sum += std::log(d.score);
  }
  if (candidate.size() < reference.size()) {
    result.brevity_penalty =
        std::exp(1.0 - static_cast<double>(reference.size()) /
                           static_cast<double>(candidate.size()));
  }
  result.value = std::clamp(
      result.brevity_penalty * std::exp(log_sum / static_cast<double>(max_n)), 0.0, 1.0);
  return result;
}

MetricResult rouge_k_recall(const TokenSequence& candidate,
                            const TokenSequence& reference, int k) {
  if (k < 1) fail(ErrorKind::kOutOfRange, "rouge: k must be >= 1");
  if (reference.size() < static_cast<std::size_t>(k)) {
    fail(ErrorKind::kReferenceTooShort,
         "rouge: reference has fewer than " + std::to_string(k) + " tokens");
  }
  NgramDetail d;
  d.n = k;
  d.total = ngram_total(reference.size(), k);
  d.matched = clipped_overlap(count_ngrams(reference, k), count_ngrams(candidate, k));
  d.score = static_cast<double>(d.matched) / static_cast<double>(d.total);
  MetricResult result;
  result.value = d.score;
  result.empty_candidate = candidate.empty();
  result.detail.push_back(d);
  return result;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    fail(ErrorKind::kLengthMismatch, "pearson: columns must have equal length >= 2");
  }
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) {
    fail(ErrorKind::kConstantColumn, "pearson: constant column");
  }
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Correlation pearson_test(std::span<const double> xs, std::span<const double> ys) {
  Correlation c;
  c.coefficient = pearson(xs, ys);
  c.n = xs.size();
  const double df = static_cast<double>(c.n) - 2.0;
  if (df <= 0.0) {
    c.p_value = 1.0;
  } else if (std::abs(c.coefficient) >= 1.0) {
    c.p_value = 0.0;
  } else {
    const double r = c.coefficient;
    const double t = r * std::sqrt(df / (1.0 - r * r));
    const boost::math::students_t dist(df);
    c.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  }
  return c;
}

}  // namespace genebench::metrics
