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

// Acceptance run: one PASS/FAIL line per criterion with its wall time.
// Exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "genebench/catalog.hpp"
#include "genebench/corpus.hpp"
#include "genebench/embed_eval.hpp"
#include "genebench/grading.hpp"
#include "genebench/harness.hpp"
#include "genebench/postprocess.hpp"
#include "genebench/text_metrics.hpp"
#include "oracles/oracles.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace gb = genebench;
using gb::testing::Gen;
using gb::testing::fixture_path;

namespace {

// Collects failures for one criterion; the first few are printed.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_.size() < 5) failures_.push_back(what);
    ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += "\n    " + f;
    if (count_ > failures_.size()) s += "\n    ... " + std::to_string(count_ - failures_.size()) + " more";
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::function<std::string(Check&)> run;  // returns a short note
};

gb::metrics::TokenSequence seq(std::vector<std::string> t) { return {std::move(t)}; }

// 1 ---------------------------------------------------------------------------
std::string gene_score_correlations(Check& c) {
  const auto rows = gb::harness::load_table(fixture_path("gene_scores.tsv"));
  c.expect(rows.size() == 20, "expected 20 rows, got " + std::to_string(rows.size()));
  std::vector<double> avg, bleu, rouge;
  for (const auto& r : rows) {
    avg.push_back(r.average);
    bleu.push_back(r.bleu.value());
    rouge.push_back(r.rouge1.value());
  }
  const auto b = gb::metrics::pearson_test(bleu, avg);
  const auto r = gb::metrics::pearson_test(rouge, avg);
  c.expect(std::abs(b.coefficient - 0.76) <= 0.02, "bleu~average r=" + fmt(b.coefficient));
  c.expect(std::abs(r.coefficient - 0.80) <= 0.02, "rouge1~average r=" + fmt(r.coefficient));
  return "bleu r=" + fmt(b.coefficient) + " p=" + fmt(b.p_value) + ", rouge1 r=" +
         fmt(r.coefficient) + " p=" + fmt(r.p_value);
}

// 2 ---------------------------------------------------------------------------
std::string average_identity(Check& c) {
  std::size_t n = 0;
  for (const char* name : {"gene_scores.tsv", "protein_scores.tsv", "marker_scores.tsv"}) {
    // load_table would already reject a bad row; check the published column
    // directly so the criterion does not depend on that.
    std::ifstream in(fixture_path(name));
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        header = true;
        continue;
      }
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, '\t')) cells.push_back(cell);
      const double f = std::stod(cells.at(1)), s = std::stod(cells.at(2)), a = std::stod(cells.at(3));
      c.expect(std::abs((f + s) / 2 - a) <= 1e-3, std::string(name) + ": " + line);
      ++n;
    }
  }
  const auto protein = gb::harness::load_table(fixture_path("protein_scores.tsv"));
  const auto marker = gb::harness::load_table(fixture_path("marker_scores.tsv"));
  c.expect(std::abs(protein.back().average - 0.645) <= 1e-3, "protein LoRA row " + fmt(protein.back().average));
  c.expect(std::abs(marker.back().average - 0.95) <= 1e-3, "marker LoRA row " + fmt(marker.back().average));
  return std::to_string(n) + " rows";
}

// 3 ---------------------------------------------------------------------------
std::string lcs_oracle(Check& c) {
  Gen gen(3003);
  const int cases = 400;
  for (int i = 0; i < cases; ++i) {
    const auto a = gen.string(0, 40, "abcdAB -");
    const auto b = gen.string(0, 40, "abcdAB -");
    const auto got = gb::grading::longest_common_substring(a, b).length;
    const auto want = gb::oracle::brute_lcs_length(a, b);
    c.expect(got == want, "'" + a + "' / '" + b + "': " + std::to_string(got) + " vs " +
                              std::to_string(want));
  }
  return std::to_string(cases) + " pairs";
}

// 4 ---------------------------------------------------------------------------
std::string metric_oracle(Check& c) {
  Gen gen(4004);
  const int cases = 600;
  for (int i = 0; i < cases; ++i) {
    const auto cand = gen.tokens(0, 30, 6);
    const auto ref = gen.tokens(1, 30, 6);
    const double b = gb::metrics::bleu(seq(cand), seq(ref), 4).value;
    const double bo = gb::oracle::naive_bleu(cand, ref, 4);
    c.expect(b == bo, "bleu case " + std::to_string(i) + ": " + fmt(b) + " vs " + fmt(bo));
    const int k = 1 + i % 3;
    if (ref.size() >= static_cast<std::size_t>(k)) {
      const double r = gb::metrics::rouge_k_recall(seq(cand), seq(ref), k).value;
      c.expect(r == gb::oracle::naive_rouge(cand, ref, k), "rouge case " + std::to_string(i));
    }
  }
  for (int i = 0; i < 100; ++i) {
    const auto x = seq(gen.tokens(1, 30, 10));
    c.expect(gb::metrics::bleu(x, x).value == 1.0, "bleu(x,x) case " + std::to_string(i));
    c.expect(gb::metrics::rouge_k_recall(x, x).value == 1.0, "rouge(x,x) case " + std::to_string(i));
  }
  return std::to_string(cases) + " pairs, 100 identities";
}

// 5 ---------------------------------------------------------------------------
std::string nmi_suite(Check& c) {
  Gen gen(5005);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = gen.size(2, 200);
    const auto a = gen.labels(n, gen.size(1, 6));
    const auto b = gen.labels(n, gen.size(1, 6));
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    gen.shuffle(perm);
    auto ra = a;
    for (auto& l : ra) l = perm[l] * 7 + 3;
    const double v = gb::embed::nmi(a, b);
    c.expect(gb::embed::nmi(ra, b) == v, "relabel case " + std::to_string(i));
    c.expect(gb::embed::nmi(b, ra) == v, "relabel+swap case " + std::to_string(i));
    c.expect(std::abs(gb::embed::nmi(b, a) - v) <= 1e-12, "symmetry case " + std::to_string(i));
  }
  const std::vector<std::size_t> x{0, 0, 1, 1}, y{0, 1, 0, 1};
  c.expect(gb::embed::nmi(x, y) == 0.0, "independent 2x2 = " + fmt(gb::embed::nmi(x, y)));
  Gen big(20240605);
  const auto a = big.labels(10000, 5);
  const auto b = big.labels(10000, 5);
  const double v = gb::embed::nmi(a, b);
  c.expect(v < 0.05, "random n=10000 nmi=" + fmt(v));
  return "random n=10000 nmi=" + fmt(v);
}

// 6 ---------------------------------------------------------------------------
std::string leiden_suite(Check& c) {
  std::size_t brute = 0;
  for (const auto& [name, g] : gb::testing::small_graph_suite()) {
    const auto best = gb::oracle::brute_force_max_modularity(g);
    const auto got = gb::embed::leiden(g, {});
    const double q = gb::embed::modularity(g, got.partition);
    c.expect(std::abs(q - best.quality) <= 1e-9,
             name + ": leiden Q=" + fmt(q) + " optimum " + fmt(best.quality));
    c.expect(gb::embed::communities_connected(g, got.partition), name + ": disconnected community");
    ++brute;
  }
  Gen gen(6006);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = gen.size(10, 200);
    const auto g = gen.random_graph(n, gen.real(2.0, 8.0) / static_cast<double>(n), i % 2 == 1);
    gb::embed::LeidenOptions o;
    o.seed = static_cast<std::uint64_t>(i);
    const auto r = gb::embed::leiden(g, o);
    for (std::size_t j = 1; j < r.level_quality.size(); ++j) {
      c.expect(r.level_quality[j] >= r.level_quality[j - 1],
               "graph " + std::to_string(i) + ": quality dropped at step " + std::to_string(j));
    }
    c.expect(gb::embed::communities_connected(g, r.partition),
             "graph " + std::to_string(i) + ": disconnected community");
  }
  const auto tri = gb::embed::leiden(gb::testing::two_triangles(), {});
  c.expect(tri.partition.community_count() == 2,
           "two triangles: " + std::to_string(tri.partition.community_count()) + " communities");
  return std::to_string(brute) + " brute-force graphs, 50 random graphs";
}

// 7 ---------------------------------------------------------------------------
std::string enrichment_suite(Check& c) {
  std::size_t checked = 0;
  for (std::size_t u = 1; u <= 12; ++u) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < u; ++i) names.push_back("G" + std::to_string(i));
    const std::set<std::string> universe(names.begin(), names.end());
    // Every (set size, cluster size, overlap) combination that can occur.
    for (std::size_t k = 0; k <= u; ++k) {
      for (std::size_t d = 0; d <= u; ++d) {
        for (std::size_t x = 0; x <= std::min(k, d); ++x) {
          if (d - x > u - k) continue;
          std::set<std::string> set(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(k));
          std::set<std::string> cluster(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(x));
          cluster.insert(names.begin() + static_cast<std::ptrdiff_t>(k),
                         names.begin() + static_cast<std::ptrdiff_t>(k + d - x));
          const double got = gb::embed::ora_enrichment(cluster, set, universe);
          const double want = gb::oracle::enumerated_upper_tail(u, k, d, x);
          c.expect(std::abs(got - want) <= 1e-12, "u=" + std::to_string(u) + " k=" +
                                                      std::to_string(k) + " d=" + std::to_string(d) +
                                                      " x=" + std::to_string(x));
          ++checked;
        }
      }
    }
  }
  const double worked = gb::embed::hypergeometric_upper_tail(10, 5, 3, 3);
  c.expect(std::abs(worked - 10.0 / 120.0) <= 1e-12, "10/5/3 overlap 3 gave " + fmt(worked));
  const std::vector<double> p{0.01, 0.2, 0.5, 0.0};
  const auto adj = gb::embed::bonferroni(p);
  const std::vector<double> want{0.04, 0.8, 1.0, 0.0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    c.expect(std::abs(adj[i] - want[i]) <= 1e-15, "bonferroni " + fmt(p[i]) + " -> " + fmt(adj[i]));
  }
  return std::to_string(checked) + " configurations";
}

// 8 ---------------------------------------------------------------------------
std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

std::string repair_suite(Check& c) {
  const auto records = gb::testing::synthetic_catalog(50);
  const auto db = gb::testing::id_database(records);
  const auto cases = gb::testing::repair_cases(records, 50, 8008);
  for (const auto& rc : cases) {
    const auto& ids = db.at(rc.gene);
    const auto fixed = gb::postprocess::correct_numeric_ids(rc.text, rc.gene, db);
    const auto out = gb::postprocess::normalize_aliases(fixed, rc.gene, db);
    const auto spans = gb::postprocess::detect_id_spans(out);
    c.expect(!spans.empty(), rc.gene + " (" + rc.kind + "): no ID left");
    for (const auto& s : spans) {
      const auto& want = s.kind == gb::postprocess::IdKind::kEnsembl ? ids.ensembl_id : ids.hgnc_id;
      c.expect(s.text == want, rc.gene + " (" + rc.kind + "): " + s.text + " != " + want);
    }
    const auto clause = gb::postprocess::canonical_alias_clause(ids.aliases);
    c.expect(count_occurrences(out, clause) == 1, rc.gene + " (" + rc.kind + "): alias clause count");
    c.expect(gb::postprocess::alias_mentions(out, rc.gene).size() == 1,
             rc.gene + " (" + rc.kind + "): alias mentions " +
                 std::to_string(gb::postprocess::alias_mentions(out, rc.gene).size()) + "\n" + out);
    c.expect(gb::postprocess::correct_numeric_ids(fixed, rc.gene, db) == fixed,
             rc.gene + " (" + rc.kind + "): id step not idempotent");
    c.expect(gb::postprocess::normalize_aliases(out, rc.gene, db) == out,
             rc.gene + " (" + rc.kind + "): alias step not idempotent");
    c.expect(gb::postprocess::normalize_aliases(
                 gb::postprocess::correct_numeric_ids(out, rc.gene, db), rc.gene, db) == out,
             rc.gene + " (" + rc.kind + "): pipeline not idempotent");
  }
  return std::to_string(cases.size()) + " cases";
}

// 9 ---------------------------------------------------------------------------
std::string grader_agreement(Check& c) {
  std::map<gb::Task, gb::grading::PromptSpec> specs{
      {gb::Task::kGeneDescription,
       gb::grading::PromptSpec::load(fixture_path("prompt_gene.txt").string())},
      {gb::Task::kProteinClassification,
       gb::grading::PromptSpec::load(fixture_path("prompt_protein.txt").string())},
      {gb::Task::kMarkerGene, gb::grading::PromptSpec::load(fixture_path("prompt_marker.txt").string())}};
  std::ifstream in(fixture_path("grader_cases.jsonl"));
  std::string line;
  std::size_t n = 0, agree = 0;
  bool cd4_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto row = gb::harness::eval_row_from_json(line);
    auto sample = row.sample;
    sample.output = j.at("output").get<std::string>();
    const auto score = gb::grading::grade_sample(sample, specs.at(sample.task));
    const double lf = j.at("label_factual").get<double>();
    const int ls = j.at("label_structural").get<int>();
    const bool ok = std::abs(score.factual - lf) <= 1e-12 && score.structural == ls;
    c.expect(ok, sample.id + ": got (" + fmt(score.factual) + ", " + std::to_string(score.structural) +
                     ") labeled (" + fmt(lf) + ", " + std::to_string(ls) + ")");
    if (sample.task == gb::Task::kMarkerGene) {
      const auto& gold = std::get<gb::MarkerRelation>(sample.gold);
      // The positive CD4 case; the fixture also holds an empty CD4 output.
      if (gold.gene == "CD4" && gold.cell_type == "CD4 T cell" && gold.is_marker && lf == 1.0) {
        cd4_seen = true;
        c.expect(score.factual == 1.0, "CD4 marker case scored " + fmt(score.factual));
      }
    }
    ++n;
    agree += ok ? 1 : 0;
  }
  c.expect(n == 30, "expected 30 cases, got " + std::to_string(n));
  c.expect(cd4_seen, "CD4 / CD4 T cell marker case missing");
  return std::to_string(agree) + "/" + std::to_string(n) + " agree";
}

// 10 --------------------------------------------------------------------------
std::string corpus_policy(Check& c) {
  const auto records = gb::testing::synthetic_catalog(200);
  auto source = gb::corpus::FixtureSource::from_records("synthetic-1", records);
  gb::corpus::CatalogClient client(source);
  gb::FunctionProvider generator([](std::string_view prompt) {
    return "Generated summary for a prompt of " + std::to_string(prompt.size()) + " characters.";
  });
  std::vector<std::string> symbols;
  std::map<std::string, gb::Biotype> biotypes;
  for (const auto& r : records) {
    symbols.push_back(r.symbol);
    biotypes[r.symbol] = r.biotype;
  }
  const auto built = gb::corpus::build_corpus(symbols, client, {}, nullptr, &generator, 10, 4);
  const auto& m = built.manifest;
  std::size_t synthetic = 0;
  for (const auto& s : m.samples) {
    if (s.source != gb::Source::kSynthetic) continue;
    ++synthetic;
    c.expect(biotypes.at(s.gene) == gb::Biotype::kProteinCoding, "synthetic sample for " + s.gene);
  }
  c.expect(synthetic == 100, "expected 100 synthetic samples, got " + std::to_string(synthetic));
  c.expect(m.samples.size() == 300, "expected 300 samples, got " + std::to_string(m.samples.size()));
  c.expect(built.skipped.empty(), "skipped genes");
  const auto [train, eval] = gb::corpus::split_eval(m, 40, 10);
  const auto tg = train.genes(), eg = eval.genes();
  std::vector<std::string> both;
  std::set_intersection(tg.begin(), tg.end(), eg.begin(), eg.end(), std::back_inserter(both));
  c.expect(both.empty(), "split shares " + std::to_string(both.size()) + " genes");
  c.expect(eg.size() == 40 && tg.size() == 160, "split gene counts");
  return std::to_string(m.samples.size()) + " samples, " + std::to_string(synthetic) + " synthetic";
}

// 11 --------------------------------------------------------------------------
std::string end_to_end_determinism(Check& c) {
  gb::testing::TempDir dir;
  gb::harness::Config cfg;
  cfg.set("task", "gene_description");
  cfg.set("corpus", fixture_path("eval_gene.jsonl").string());
  cfg.set("prompt_spec", fixture_path("prompt_gene.txt").string());
  cfg.set("output_dir", (dir / "run").string());
  cfg.set("model", "mock");
  cfg.set("seed", "11");
  cfg.set("parallelism", "4");
  const auto rc = gb::harness::RunConfig::from(cfg);
  // Answers with the prompt's gene symbol and a fixed sentence.
  gb::FunctionProvider mock([](std::string_view prompt) {
    const auto gene_pos = prompt.find("gene ");
    const auto rest = prompt.substr(gene_pos == std::string_view::npos ? 0 : gene_pos + 5);
    const auto sym = rest.substr(0, rest.find(' '));
    return std::string(sym) + " encodes a protein that regulates transcription and cell growth.";
  });
  gb::harness::full_run(rc, mock);
  const std::string first = gb::testing::read_text(dir / "run" / "report.tsv");
  const std::string first_outputs = gb::testing::read_text(rc.outputs_path());
  gb::harness::full_run(rc, mock);
  const std::string second = gb::testing::read_text(dir / "run" / "report.tsv");
  c.expect(!first.empty(), "empty report");
  c.expect(first == second, "report.tsv differs between runs");
  c.expect(first_outputs == gb::testing::read_text(rc.outputs_path()), "outputs differ between runs");
  return std::to_string(first.size()) + " report bytes";
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gene score correlations", 1, gene_score_correlations},
      {2, "average column identity", 1, average_identity},
      {3, "LCS oracle equivalence", 5, lcs_oracle},
      {4, "metric oracle equivalence", 10, metric_oracle},
      {5, "NMI suite", 10, nmi_suite},
      {6, "Leiden suite", 60, leiden_suite},
      {7, "enrichment suite", 10, enrichment_suite},
      {8, "post-processing suite", 5, repair_suite},
      {9, "grader fixture agreement", 5, grader_agreement},
      {10, "corpus policy", 30, corpus_policy},
      {11, "end-to-end determinism", 60, end_to_end_determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    std::string note;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      note = cr.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    check.expect(secs < cr.budget_seconds,
                 "took " + fmt(secs) + "s, budget " + fmt(cr.budget_seconds) + "s");
    const bool ok = check.ok();
    failed += ok ? 0 : 1;
    std::printf("%s %2d %-28s %8.3fs  %s%s\n", ok ? "PASS" : "FAIL", cr.number, cr.name.c_str(), secs,
                note.c_str(), check.summary().c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}
