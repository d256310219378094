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

#include "genebench/grading.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "genebench/error.hpp"
#include "genebench/stopwords.hpp"
#include "genebench/text.hpp"
#include "genebench/text_metrics.hpp"
#include "genebench/unicode.hpp"

namespace genebench::grading {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<std::string_view> lines_of(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::u32string strip_punctuation(std::u32string s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && unicode::is_punctuation(s[b])) ++b;
  while (e > b && unicode::is_punctuation(s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool has_list_marker(std::string_view line) {
  const std::string_view t = text::trim(line);
  if (t.empty()) return false;
  auto marker_then_gap = [&](std::size_t len) {
    return t.size() == len || text::is_ascii_space(t[len]);
  };
  if (t[0] == '-' || t[0] == '*' || t[0] == '+') return marker_then_gap(1);
  if (t.substr(0, 3) == "\xE2\x80\xA2") return marker_then_gap(3);  // bullet
  std::size_t i = 0;
  while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i;
  if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')')) return marker_then_gap(i + 1);
  return false;
}

bool has_section(std::string_view output, std::string_view tag) {
  const std::u32string folded_tag = text::fold(tag);
  if (folded_tag.empty()) return false;
  for (std::string_view line : lines_of(output)) {
    std::u32string l = text::fold(line);
    std::size_t b = 0;
    while (b < l.size() && (l[b] == U'#' || l[b] == U'*' || l[b] == U' ')) ++b;
    l = l.substr(b);
    if (l.compare(0, folded_tag.size(), folded_tag) != 0) continue;
    if (l.size() == folded_tag.size()) return true;
    const char32_t next = l[folded_tag.size()];
    if (next == U':' || next == U'*' || next == U'#') return true;
  }
  return false;
}

std::string substitute_gene(const std::string& s, std::string_view gene) {
  std::string out = s;
  const std::string_view key = "{gene}";
  for (std::size_t pos = out.find(key); pos != std::string::npos;
       pos = out.find(key, pos + gene.size())) {
    out.replace(pos, key.size(), gene);
  }
  return out;
}

std::size_t parse_count(const std::string& word, const std::string& line) {
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(word, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != word.size() || word.empty() || word[0] == '-') {
    fail(ErrorKind::kConfigInvalid, "prompt spec: bad number in '" + line + "'");
  }
  return value;
}

std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& tok : metrics::tokenize(s).tokens) {
    if (!is_stopword(tok)) out.push_back(std::move(tok));
  }
  return out;
}

Stance stance_of_word(const std::string& w) {
  if (w == "yes" || w == "true") return Stance::kYes;
  if (w == "no" || w == "false") return Stance::kNo;
  return Stance::kUnparseable;
}

double sorted_mean(std::vector<double> column) {
  std::sort(column.begin(), column.end());
  double sum = 0.0;
  for (double v : column) sum += v;
  return sum / static_cast<double>(column.size());
}

}  // namespace

bool check_rule(const StructuralRule& rule, std::string_view output) {
  const std::string_view t = text::trim(output);
  return std::visit(
      Overloaded{
          [&](const SingleParagraph&) {
            return !t.empty() && t.find('\n') == std::string_view::npos;
          },
          [&](const SentenceCountRange& r) {
            const std::size_t n = text::sentence_spans(t).size();
            return n >= r.min && n <= r.max;
          },
          [&](const StartsWithToken& r) {
            const std::size_t end = t.find_first_of(" \t\r\n");
            const std::u32string first = strip_punctuation(text::fold(t.substr(0, end)));
            return !first.empty() && first == strip_punctuation(text::fold(r.token));
          },
          [&](const NoListMarkers&) {
            const auto lines = lines_of(t);
            return std::none_of(lines.begin(), lines.end(), has_list_marker);
          },
          [&](const MaxChars& r) { return unicode::decode(t).size() <= r.n; },
          [&](const ContainsSection& r) { return has_section(t, r.tag); },
      },
      rule);
}

std::string describe(const StructuralRule& rule) {
  return std::visit(
      Overloaded{
          [](const SingleParagraph&) -> std::string { return "single_paragraph"; },
          [](const SentenceCountRange& r) -> std::string {
            return "sentence_count_range " + std::to_string(r.min) + " " +
                   std::to_string(r.max);
          },
          [](const StartsWithToken& r) -> std::string { return "starts_with_token " + r.token; },
          [](const NoListMarkers&) -> std::string { return "no_list_markers"; },
          [](const MaxChars& r) -> std::string { return "max_chars " + std::to_string(r.n); },
          [](const ContainsSection& r) -> std::string { return "contains_section " + r.tag; },
      },
      rule);
}

PromptSpec::PromptSpec(std::vector<StructuralRule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) fail(ErrorKind::kConfigInvalid, "prompt spec has no rules");
}

PromptSpec PromptSpec::parse(std::string_view body) {
  std::vector<StructuralRule> rules;
  for (std::string_view raw : lines_of(body)) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = text::trim(line);
    if (line.empty()) continue;
    std::istringstream in{std::string(line)};
    std::string name;
    in >> name;
    std::string rest;
    std::getline(in, rest);
    rest = std::string(text::trim(rest));
    const std::string full(line);
    if (name == "single_paragraph" && rest.empty()) {
      rules.emplace_back(SingleParagraph{});
    } else if (name == "no_list_markers" && rest.empty()) {
      rules.emplace_back(NoListMarkers{});
    } else if (name == "sentence_count_range") {
      std::istringstream nums(rest);
      std::string lo;
      std::string hi;
      std::string extra;
      nums >> lo >> hi >> extra;
      if (hi.empty() || !extra.empty()) {
        fail(ErrorKind::kConfigInvalid, "prompt spec: expected two bounds in '" + full + "'");
      }
      SentenceCountRange r{parse_count(lo, full), parse_count(hi, full)};
      if (r.min > r.max) {
        fail(ErrorKind::kConfigInvalid, "prompt spec: min > max in '" + full + "'");
      }
      rules.emplace_back(r);
    } else if (name == "starts_with_token" && !rest.empty() &&
               rest.find_first_of(" \t") == std::string::npos) {
      rules.emplace_back(StartsWithToken{rest});
    } else if (name == "max_chars" && !rest.empty()) {
      rules.emplace_back(MaxChars{parse_count(rest, full)});
    } else if (name == "contains_section" && !rest.empty()) {
      rules.emplace_back(ContainsSection{rest});
    } else {
      fail(ErrorKind::kConfigInvalid, "prompt spec: cannot parse rule '" + full + "'");
    }
  }
  return PromptSpec(std::move(rules));
}

PromptSpec PromptSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfigInvalid, "cannot open prompt spec " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

PromptSpec PromptSpec::bind(std::string_view gene) const {
  std::vector<StructuralRule> bound = rules_;
  for (auto& rule : bound) {
    if (auto* r = std::get_if<StartsWithToken>(&rule)) r->token = substitute_gene(r->token, gene);
    if (auto* r = std::get_if<ContainsSection>(&rule)) r->tag = substitute_gene(r->tag, gene);
  }
  return PromptSpec(std::move(bound));
}

std::string PromptSpec::to_text() const {
  std::string out;
  for (const auto& rule : rules_) out += describe(rule) + "\n";
  return out;
}

int grade_structural(std::string_view output, const PromptSpec& spec) {
  if (text::trim(output).empty()) return 0;
  for (const auto& rule : spec.rules()) {
    if (!check_rule(rule, output)) return 0;
  }
  return 1;
}

GeneFactual grade_gene_factual_detail(std::string_view output, const GeneRecord& gold,
                                      const GraderConfig& cfg) {
  const std::vector<std::string> gold_words = content_words(gold.summary);
  if (gold_words.empty()) {
    fail(ErrorKind::kEmptyGold, "gold summary of " + gold.symbol + " has no content words");
  }
  GeneFactual r;
  std::vector<std::string> names{gold.symbol, gold.full_name};
  names.insert(names.end(), gold.aliases.begin(), gold.aliases.end());
  for (const auto& name : names) {
    if (!name.empty() && text::contains_word_phrase(output, name)) {
      r.name_matched = true;
      r.matched_name = name;
      break;
    }
  }
  std::unordered_map<std::string, std::size_t> available;
  for (auto& w : content_words(output)) ++available[w];
  for (const auto& w : gold_words) {
    auto it = available.find(w);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++r.matched_words;
    }
  }
  r.gold_words = gold_words.size();
  r.recall = static_cast<double>(r.matched_words) / static_cast<double>(r.gold_words);
  // Inclusive threshold; the slack absorbs the rounding of e.g. 3/10 vs 0.3.
  const bool function_ok = r.recall >= cfg.function_recall_threshold - 1e-12;
  r.score = r.name_matched && function_ok ? 1 : 0;
  return r;
}

int grade_gene_factual(std::string_view output, const GeneRecord& gold,
                       const GraderConfig& cfg) {
  return grade_gene_factual_detail(output, gold, cfg).score;
}

CommonSubstring longest_common_substring(std::string_view a, std::string_view b) {
  const std::u32string x = text::fold(a);
  const std::u32string y = text::fold(b);
  CommonSubstring best;
  if (x.empty() || y.empty()) return best;
  std::vector<std::size_t> prev(y.size() + 1, 0);
  std::vector<std::size_t> cur(y.size() + 1, 0);
  std::size_t best_end = 0;  // exclusive end in x
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1 : 0;
      // Strictly greater: the first end position reached for a length is the
      // earliest start in x for that length.
      if (cur[j] > best.length) {
        best.length = cur[j];
        best_end = i;
      }
    }
    std::swap(prev, cur);
  }
  best.text = unicode::encode(
      std::u32string_view(x).substr(best_end - best.length, best.length));
  return best;
}

std::size_t longest_common_subsequence(std::string_view a, std::string_view b) {
  const std::u32string x = text::fold(a);
  const std::u32string y = text::fold(b);
  std::vector<std::size_t> prev(y.size() + 1, 0);
  std::vector<std::size_t> cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

double grade_protein_factual(std::string_view output, std::string_view gold_name,
                             ProteinScorer scorer) {
  const std::size_t gold_len = text::fold(gold_name).size();
  if (gold_len == 0) fail(ErrorKind::kEmptyGold, "empty gold protein name");
  const std::size_t common = scorer == ProteinScorer::kSubstring
                                 ? longest_common_substring(output, gold_name).length
                                 : longest_common_subsequence(output, gold_name);
  return std::clamp(static_cast<double>(common) / static_cast<double>(gold_len), 0.0, 1.0);
}

Stance parse_stance(std::string_view output) {
  static const char* const kFields[] = {"answer", "prediction", "is_marker", "is marker",
                                        "marker"};
  for (std::string_view line : lines_of(output)) {
    std::string l = unicode::encode(text::fold(line));
    const std::size_t b = l.find_first_not_of("#*- ");
    if (b == std::string::npos) continue;
    l = l.substr(b);
    for (const char* field : kFields) {
      const std::string_view f(field);
      if (l.compare(0, f.size(), f) != 0) continue;
      std::size_t p = l.find_first_not_of(" *", f.size());
      if (p == std::string::npos || (l[p] != ':' && l[p] != '=')) continue;
      const auto tokens = metrics::tokenize(std::string_view(l).substr(p + 1)).tokens;
      if (!tokens.empty()) {
        const Stance s = stance_of_word(tokens.front());
        if (s != Stance::kUnparseable) return s;
      }
    }
  }
  const auto tokens = metrics::tokenize(output).tokens;
  if (tokens.empty()) return Stance::kUnparseable;
  return stance_of_word(tokens.front());
}

MarkerGrade grade_marker(std::string_view output, const MarkerRelation& gold) {
  gold.validate();
  MarkerGrade g;
  const Stance s = parse_stance(output);
  if (s == Stance::kUnparseable) {
    g.unparseable = true;
    return g;
  }
  g.score = (s == Stance::kYes) == gold.is_marker ? 1 : 0;
  return g;
}

void EvalSample::validate() const {
  const bool ok = (task == Task::kGeneDescription && std::holds_alternative<GeneRecord>(gold)) ||
                  (task == Task::kProteinClassification &&
                   std::holds_alternative<std::string>(gold)) ||
                  (task == Task::kMarkerGene && std::holds_alternative<MarkerRelation>(gold));
  if (!ok) {
    fail(ErrorKind::kParse,
         "sample " + id + ": gold does not match task " + std::string(to_string(task)));
  }
}

SampleScore grade_sample(const EvalSample& sample, const PromptSpec& spec,
                         const GraderConfig& cfg) {
  sample.validate();
  SampleScore s;
  s.id = sample.id;
  switch (sample.task) {
    case Task::kGeneDescription: {
      const auto& gold = std::get<GeneRecord>(sample.gold);
      s.factual = grade_gene_factual(sample.output, gold, cfg);
      s.structural = grade_structural(sample.output, spec.bind(gold.symbol));
      break;
    }
    case Task::kProteinClassification:
      s.factual = grade_protein_factual(sample.output, std::get<std::string>(sample.gold),
                                        cfg.protein_scorer);
      s.structural = grade_structural(sample.output, spec);
      break;
    case Task::kMarkerGene: {
      const auto& gold = std::get<MarkerRelation>(sample.gold);
      const MarkerGrade m = grade_marker(sample.output, gold);
      s.factual = m.score;
      s.unparseable = m.unparseable;
      s.structural = grade_structural(sample.output, spec.bind(gold.gene));
      break;
    }
  }
  return s;
}

GradeReport aggregate(std::vector<SampleScore> per_sample) {
  if (per_sample.empty()) fail(ErrorKind::kEmptyList, "aggregate: no samples");
  std::stable_sort(per_sample.begin(), per_sample.end(),
                   [](const SampleScore& a, const SampleScore& b) { return text::id_less(a.id, b.id); });
  std::vector<double> factual;
  std::vector<double> structural;
  GradeReport report;
  for (const auto& s : per_sample) {
    factual.push_back(s.factual);
    structural.push_back(s.structural);
    if (s.unparseable) ++report.unparseable;
  }
  report.factual_mean = sorted_mean(std::move(factual));
  report.structural_mean = sorted_mean(std::move(structural));
  report.average = (report.factual_mean + report.structural_mean) / 2.0;
  report.per_sample = std::move(per_sample);
  return report;
}

}  // namespace genebench::grading
