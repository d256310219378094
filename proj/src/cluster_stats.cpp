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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <iterator>
#include <sstream>
#include <unordered_map>

#include "genebench/embed_eval.hpp"
#include "genebench/error.hpp"
#include "genebench/text.hpp"

namespace genebench::embed {

std::vector<std::size_t> encode_labels(std::span<const std::string> labels) {
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    out.push_back(ids.try_emplace(label, ids.size()).first->second);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open labels file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string_view::npos) {
      fail(ErrorKind::kParse, "labels line " + std::to_string(line_no) + ": expected symbol<TAB>label");
    }
    std::string sym(text::trim(t.substr(0, tab)));
    std::string label(text::trim(t.substr(tab + 1)));
    if (sym.empty() || label.empty()) fail(ErrorKind::kParse, "labels line " + std::to_string(line_no) + ": empty field");
    if (!seen.insert(sym).second) fail(ErrorKind::kParse, "labels: repeated symbol " + sym);
    out.emplace_back(std::move(sym), std::move(label));
  }
  return out;
}

namespace {

double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double entropy(const std::map<std::size_t, std::size_t>& counts, double total) {
  std::vector<double> terms;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / total;
    terms.push_back(-p * std::log(p));
  }
  return sorted_sum(terms);
}

}  // namespace

double nmi(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size() || a.empty()) {
    fail(ErrorKind::kLengthMismatch, "nmi: labelings must be non-empty and of equal length");
  }
  const double total = static_cast<double>(a.size());
  std::map<std::size_t, std::size_t> ca;
  std::map<std::size_t, std::size_t> cb;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++joint[{a[i], b[i]}];
  }
  const bool const_a = ca.size() == 1;
  const bool const_b = cb.size() == 1;
  if (const_a && const_b) return 1.0;
  if (const_a || const_b) return 0.0;

  std::vector<double> terms;
  for (const auto& [key, c] : joint) {
    const double nij = static_cast<double>(c);
    const double outer = static_cast<double>(ca[key.first]) * static_cast<double>(cb[key.second]);
    terms.push_back(nij / total * std::log(total * nij / outer));
  }
  const double mi = sorted_sum(terms);
  const double ha = entropy(ca, total);
  const double hb = entropy(cb, total);
  return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

double hypergeometric_upper_tail(std::size_t population, std::size_t successes,
                                 std::size_t draws, std::size_t observed) {
  if (successes > population || draws > population) {
    fail(ErrorKind::kOutOfRange, "hypergeometric: successes and draws must not exceed population");
  }
  const std::size_t lo = draws > population - successes ? draws - (population - successes) : 0;
  const std::size_t hi = std::min(successes, draws);
  if (observed <= lo) return 1.0;
  if (observed > hi) return 0.0;

  auto log_choose = [](double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  };
  const double big_n = static_cast<double>(population);
  const double big_k = static_cast<double>(successes);
  const double small_n = static_cast<double>(draws);
  const double denom = log_choose(big_n, small_n);
  std::vector<double> logs;
  for (std::size_t x = observed; x <= hi; ++x) {
    const double dx = static_cast<double>(x);
    logs.push_back(log_choose(big_k, dx) + log_choose(big_n - big_k, small_n - dx) - denom);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double s = 0.0;
  for (double l : logs) s += std::exp(l - top);
  return std::clamp(std::exp(top + std::log(s)), 0.0, 1.0);
}

double ora_enrichment(const std::set<std::string>& cluster_genes,
                      const std::set<std::string>& gene_set,
                      const std::set<std::string>& universe) {
  auto subset = [&](const std::set<std::string>& s) {
    return std::includes(universe.begin(), universe.end(), s.begin(), s.end());
  };
  if (!subset(cluster_genes)) fail(ErrorKind::kNotSubset, "cluster genes are not in the universe");
  if (!subset(gene_set)) fail(ErrorKind::kNotSubset, "gene set is not in the universe");
  std::size_t overlap = 0;
  for (const auto& g : cluster_genes) overlap += gene_set.count(g);
  return hypergeometric_upper_tail(universe.size(), gene_set.size(), cluster_genes.size(),
                                   overlap);
}

std::vector<double> bonferroni(std::span<const double> pvals) {
  std::vector<double> out;
  out.reserve(pvals.size());
  const double m = static_cast<double>(pvals.size());
  for (double p : pvals) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::kOutOfRange, "p-value outside [0, 1]");
    out.push_back(std::min(1.0, p * m));
  }
  return out;
}

std::vector<PathwayResult> top_pathways(std::vector<PathwayResult> results, std::size_t n) {
  std::sort(results.begin(), results.end(), [](const PathwayResult& a, const PathwayResult& b) {
    if (a.adjusted_p != b.adjusted_p) return a.adjusted_p < b.adjusted_p;
    return a.pathway < b.pathway;
  });
  if (results.size() > n) results.resize(n);
  return results;
}

namespace {

std::set<std::string> parse_symbols(std::string_view list) {
  std::set<std::string> out;
  for (const auto& part : text::split(list, ',')) {
    const auto sym = text::trim(part);
    if (!sym.empty()) out.emplace(sym);
  }
  return out;
}

}  // namespace

GeneSetCollection GeneSetCollection::parse(std::string_view body) {
  GeneSetCollection out;
  bool have_universe = false;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(body, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      fail(ErrorKind::kParse, "gene sets line " + std::to_string(line_no) + ": expected a tab");
    }
    const std::string name(text::trim(line.substr(0, tab)));
    auto genes = parse_symbols(line.substr(tab + 1));
    if (!have_universe) {
      if (name != "universe") fail(ErrorKind::kParse, "gene sets: first line must be the universe");
      out.universe = std::move(genes);
      have_universe = true;
      continue;
    }
    if (!std::includes(out.universe.begin(), out.universe.end(), genes.begin(), genes.end())) {
      fail(ErrorKind::kNotSubset, "gene set " + name + " has genes outside the universe");
    }
    out.sets.emplace_back(name, std::move(genes));
  }
  if (!have_universe) fail(ErrorKind::kParse, "gene sets: missing universe line");
  return out;
}

GeneSetCollection GeneSetCollection::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open gene sets file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<PathwayResult> enrich_cluster(const std::set<std::string>& cluster_genes,
                                          const GeneSetCollection& collection) {
  std::set<std::string> cluster;
  std::set_intersection(cluster_genes.begin(), cluster_genes.end(), collection.universe.begin(),
                        collection.universe.end(), std::inserter(cluster, cluster.end()));
  std::vector<PathwayResult> out;
  std::vector<double> pvals;
  for (const auto& [name, genes] : collection.sets) {
    PathwayResult r;
    r.pathway = name;
    for (const auto& g : cluster) r.overlap += genes.count(g);
    r.p_value = ora_enrichment(cluster, genes, collection.universe);
    pvals.push_back(r.p_value);
    out.push_back(std::move(r));
  }
  const auto adjusted = bonferroni(pvals);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].adjusted_p = adjusted[i];
  return out;
}

}  // namespace genebench::embed
