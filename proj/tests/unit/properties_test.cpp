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

// Property tests over seeded random inputs. Each loop prints its seed and
// case index on failure so the case can be replayed.

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "genebench/catalog.hpp"
#include "genebench/clock.hpp"
#include "genebench/corpus.hpp"
#include "genebench/embed_eval.hpp"
#include "genebench/error.hpp"
#include "genebench/grading.hpp"
#include "genebench/postprocess.hpp"
#include "genebench/text_metrics.hpp"
#include "oracles/oracles.hpp"
#include "support/generators.hpp"

namespace genebench {
namespace {

using testing::Gen;

metrics::TokenSequence seq(std::vector<std::string> t) { return {std::move(t)}; }

// ---------------------------------------------------------------------------
// Graders

TEST(GradingProperty, LongestCommonSubstringMatchesBruteForce) {
  Gen gen(101);
  for (int c = 0; c < 300; ++c) {
    const std::string a = gen.string(0, 40, "abcAB  ");
    const std::string b = gen.string(0, 40, "abcAB  ");
    const auto got = grading::longest_common_substring(a, b);
    ASSERT_EQ(got.length, oracle::brute_lcs_length(a, b)) << "case " << c << " a='" << a
                                                          << "' b='" << b << "'";
    ASSERT_EQ(got.text.size(), got.length);
  }
}

TEST(GradingProperty, ProteinFactualBoundsAndIdentity) {
  Gen gen(102);
  for (int c = 0; c < 300; ++c) {
    const std::string gold = gen.string(1, 20, "abcdeXYZ -");
    if (gold.find_first_not_of(' ') == std::string::npos) continue;  // blank gold is rejected
    const std::string out = gen.string(0, 20, "abcdefgh XYZ");
    for (auto scorer : {grading::ProteinScorer::kSubstring, grading::ProteinScorer::kSubsequence}) {
      const double s = grading::grade_protein_factual(out, gold, scorer);
      ASSERT_GE(s, 0.0);
      ASSERT_LE(s, 1.0);
    }
    const double sub = grading::grade_protein_factual(out, gold);
    ASSERT_LE(sub, grading::grade_protein_factual(out, gold, grading::ProteinScorer::kSubsequence));
    // Zero exactly when no non-space character of the gold occurs in the output.
    bool shared = false;
    for (char ch : gold) {
      if (ch == ' ') continue;
      const char lo = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      for (char o : out) {
        if (static_cast<char>(std::tolower(static_cast<unsigned char>(o))) == lo) shared = true;
      }
    }
    ASSERT_EQ(sub == 0.0, !shared) << "gold='" << gold << "' out='" << out << "'";
    ASSERT_EQ(grading::grade_protein_factual(gold, gold), 1.0) << gold;
  }
}

TEST(GradingProperty, StructuralIsMonotoneInRules) {
  Gen gen(103);
  const std::vector<grading::StructuralRule> pool{
      grading::SingleParagraph{},
      grading::SentenceCountRange{1, 3},
      grading::StartsWithToken{"TP53"},
      grading::NoListMarkers{},
      grading::MaxChars{60},
      grading::ContainsSection{"Summary"}};
  const std::vector<std::string> pieces{"TP53 binds DNA.", " It is nuclear.", "\n\n", "- item",
                                        " Summary: ok.", " more words here", "tp53"};
  for (int c = 0; c < 300; ++c) {
    std::string out;
    for (std::size_t i = gen.size(0, 4); i > 0; --i) out += gen.pick(pieces);
    std::vector<grading::StructuralRule> rules{gen.pick(pool)};
    for (std::size_t i = gen.size(0, 3); i > 0; --i) rules.push_back(gen.pick(pool));
    const int before = grading::grade_structural(out, grading::PromptSpec(rules));
    rules.push_back(gen.pick(pool));
    const int after = grading::grade_structural(out, grading::PromptSpec(rules));
    ASSERT_LE(after, before) << "case " << c << " output '" << out << "'";
  }
}

TEST(GradingProperty, AggregateIgnoresOrder) {
  Gen gen(104);
  for (int c = 0; c < 100; ++c) {
    std::vector<grading::SampleScore> scores;
    for (std::size_t i = gen.size(1, 30); i > 0; --i) {
      scores.push_back({std::to_string(i), gen.real(0, 1), gen.coin() ? 1 : 0, gen.coin(0.1)});
    }
    const auto a = grading::aggregate(scores);
    gen.shuffle(scores);
    const auto b = grading::aggregate(scores);
    ASSERT_EQ(a.factual_mean, b.factual_mean);
    ASSERT_EQ(a.structural_mean, b.structural_mean);
    ASSERT_EQ(a.average, b.average);
    ASSERT_EQ(a.unparseable, b.unparseable);
  }
}

// ---------------------------------------------------------------------------
// Text metrics

TEST(MetricsProperty, MatchNaiveCounter) {
  Gen gen(201);
  for (int c = 0; c < 500; ++c) {
    const auto cand = gen.tokens(0, 30, 6);
    const auto ref = gen.tokens(1, 30, 6);
    const int max_n = static_cast<int>(gen.size(1, 4));
    ASSERT_EQ(metrics::bleu(seq(cand), seq(ref), max_n).value,
              oracle::naive_bleu(cand, ref, max_n))
        << "case " << c;
    const int k = static_cast<int>(gen.size(1, 3));
    if (ref.size() >= static_cast<std::size_t>(k)) {
      ASSERT_EQ(metrics::rouge_k_recall(seq(cand), seq(ref), k).value,
                oracle::naive_rouge(cand, ref, k))
          << "case " << c;
    }
  }
}

TEST(MetricsProperty, IdentityScoresOne) {
  Gen gen(202);
  for (int c = 0; c < 100; ++c) {
    const auto x = seq(gen.tokens(1, 30, 8));
    ASSERT_EQ(metrics::bleu(x, x).value, 1.0) << "case " << c;
    ASSERT_EQ(metrics::rouge_k_recall(x, x, 1).value, 1.0);
  }
}

TEST(MetricsProperty, RougeUnigramIgnoresCandidateOrder) {
  Gen gen(203);
  for (int c = 0; c < 200; ++c) {
    auto cand = gen.tokens(0, 25, 7);
    const auto ref = seq(gen.tokens(1, 25, 7));
    const double before = metrics::rouge_k_recall(seq(cand), ref, 1).value;
    gen.shuffle(cand);
    ASSERT_EQ(metrics::rouge_k_recall(seq(cand), ref, 1).value, before);
  }
}

// BLEU can exceed the unigram precision when a smoothed higher-order term
// or a matched higher-order precision is larger than p1 (see the frozen
// counterexample in the unit tests). The bound does hold whenever no
// higher-order precision exceeds p1.
TEST(MetricsProperty, BleuBoundedByUnigramPrecisionWhenOrdersDecrease) {
  Gen gen(204);
  int checked = 0;
  for (int c = 0; c < 2000; ++c) {
    const auto cand = seq(gen.tokens(1, 20, 5));
    const auto ref = seq(gen.tokens(1, 20, 5));
    const auto r = metrics::bleu(cand, ref);
    const double p1 = r.detail.at(0).score;
    bool ordered = true;
    for (const auto& d : r.detail) ordered = ordered && d.score <= p1;
    if (!ordered) continue;
    ++checked;
    // exp(log p) may land one ulp above p.
    ASSERT_LE(r.value, p1 * (1.0 + 1e-12)) << "case " << c;
  }
  EXPECT_GT(checked, 500);
}

TEST(MetricsProperty, PearsonAffineInvariant) {
  Gen gen(205);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = gen.size(3, 30);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = gen.real(-5, 5);
      y[i] = 0.5 * x[i] + gen.real(-3, 3);
    }
    const double r = metrics::pearson(x, y);
    const double a = gen.real(0.1, 10);
    const double b = gen.real(-10, 10);
    std::vector<double> tx(n);
    for (std::size_t i = 0; i < n; ++i) tx[i] = a * x[i] + b;
    ASSERT_NEAR(metrics::pearson(tx, y), r, 1e-12) << "case " << c;
    ASSERT_NEAR(metrics::pearson(y, tx), r, 1e-12);
    ASSERT_LE(std::abs(r), 1.0);
  }
}

// ---------------------------------------------------------------------------
// Corpus and catalog

class CountingSource : public corpus::CatalogSource {
 public:
  explicit CountingSource(corpus::CatalogSource& inner) : inner_(inner) {}
  GeneRecord lookup(std::string_view symbol) override {
    ++calls;
    return inner_.lookup(symbol);
  }
  std::string version() const override { return inner_.version(); }
  std::atomic<int> calls{0};

 private:
  corpus::CatalogSource& inner_;
};

corpus::InstructionSample sample_for(const GeneRecord& r, Source source, const std::string& out) {
  corpus::InstructionSample s;
  s.instruction = "Describe " + r.symbol;
  s.output = out;
  s.source = source;
  s.gene = r.symbol;
  return s;
}

TEST(CorpusProperty, MergeKeepsOnlyProteinCodingSynthetic) {
  const auto catalog = testing::synthetic_catalog(40);
  std::map<std::string, Biotype> biotypes;
  for (const auto& r : catalog) biotypes[r.symbol] = r.biotype;
  const corpus::BiotypeLookup lookup = [&](std::string_view s) { return biotypes.at(std::string(s)); };
  Gen gen(301);
  for (int c = 0; c < 50; ++c) {
    std::vector<corpus::InstructionSample> real, synthetic;
    std::map<std::pair<std::string, Source>, std::size_t> longest;
    for (std::size_t i = gen.size(1, 60); i > 0; --i) {
      const auto& r = gen.pick(catalog);
      const bool synth = r.biotype == Biotype::kProteinCoding && gen.coin();
      const auto out = gen.string(1, 12, "abc");
      (synth ? synthetic : real).push_back(sample_for(r, synth ? Source::kSynthetic : Source::kReal, out));
      auto& best = longest[{r.symbol, synth ? Source::kSynthetic : Source::kReal}];
      best = std::max(best, out.size());
    }
    const auto merged = corpus::merge_corpora(real, synthetic, lookup);
    ASSERT_EQ(merged.samples.size(), longest.size());
    for (const auto& s : merged.samples) {
      if (s.source == Source::kSynthetic) {
        ASSERT_EQ(biotypes.at(s.gene), Biotype::kProteinCoding);
      }
      ASSERT_EQ(s.output.size(), (longest.at({s.gene, s.source})));
    }
    // Adding one synthetic sample for a non-coding gene is always refused.
    for (const auto& r : catalog) {
      if (r.biotype == Biotype::kProteinCoding) continue;
      synthetic.push_back(sample_for(r, Source::kSynthetic, "x"));
      EXPECT_THROW(corpus::merge_corpora(real, synthetic, lookup), Error);
      break;
    }
  }
}

TEST(CorpusProperty, SplitIsGeneDisjointAndComplete) {
  const auto catalog = testing::synthetic_catalog(60);
  corpus::CorpusManifest m;
  Gen gen(302);
  for (const auto& r : catalog) {
    m.biotypes[r.symbol] = r.biotype;
    for (std::size_t i = gen.size(1, 3); i > 0; --i) {
      auto s = sample_for(r, Source::kReal, "o");
      s.task = i == 1 ? Task::kGeneDescription : Task::kProteinClassification;
      s.image_ref = s.task == Task::kGeneDescription ? std::nullopt
                                                     : std::optional<std::string>("img.png");
      m.samples.push_back(s);
    }
  }
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = gen.size(0, catalog.size());
    const std::uint64_t seed = gen.rng().next();
    const auto [train, eval] = corpus::split_eval(m, n, seed);
    const auto tg = train.genes();
    const auto eg = eval.genes();
    ASSERT_EQ(eg.size(), n);
    std::vector<std::string> both;
    std::set_intersection(tg.begin(), tg.end(), eg.begin(), eg.end(), std::back_inserter(both));
    ASSERT_TRUE(both.empty());
    std::set<std::string> all(tg.begin(), tg.end());
    all.insert(eg.begin(), eg.end());
    ASSERT_EQ(all.size(), catalog.size());
    ASSERT_EQ(train.samples.size() + eval.samples.size(), m.samples.size());
    const auto again = corpus::split_eval(m, n, seed);
    ASSERT_EQ(again.second.samples, eval.samples);
  }
}

TEST(CatalogProperty, RepeatedFetchesHitTheSourceOncePerSymbol) {
  const auto catalog = testing::synthetic_catalog(12);
  auto src = corpus::FixtureSource::from_records("v1", catalog);
  Gen gen(303);
  for (int c = 0; c < 20; ++c) {
    CountingSource counting(src);
    corpus::CatalogClient client(counting);
    std::set<std::string> seen;
    for (std::size_t i = gen.size(1, 40); i > 0; --i) {
      const auto& sym = gen.pick(catalog).symbol;
      seen.insert(sym);
      ASSERT_EQ(corpus::fetch_gene_record(sym, client).symbol, sym);
    }
    ASSERT_EQ(static_cast<std::size_t>(counting.calls.load()), seen.size());
  }
}

TEST(CatalogProperty, RateLimiterWindow) {
  Gen gen(304);
  for (int c = 0; c < 50; ++c) {
    ManualClock clock;
    const double rate = static_cast<double>(gen.size(1, 5));
    RateLimiter limiter(rate, clock);
    std::vector<double> issued;
    for (std::size_t i = gen.size(5, 40); i > 0; --i) {
      if (gen.coin(0.3)) clock.sleep_for(gen.real(0, 0.7));
      issued.push_back(limiter.acquire());
    }
    for (std::size_t i = 0; i < issued.size(); ++i) {
      const auto in_window = std::count_if(issued.begin(), issued.end(), [&](double t) {
        return t >= issued[i] && t < issued[i] + 1.0;
      });
      ASSERT_LE(static_cast<double>(in_window), rate) << "case " << c;
    }
  }
}

// ---------------------------------------------------------------------------
// Post-processing

class PostprocessProperty : public ::testing::Test {
 protected:
  std::vector<GeneRecord> records = testing::synthetic_catalog(20);
  postprocess::GeneIdDatabase db = testing::id_database(records);
  std::vector<testing::RepairCase> cases = testing::repair_cases(records, 200, 401);
};

TEST_F(PostprocessProperty, Idempotent) {
  for (const auto& rc : cases) {
    const auto once = postprocess::correct_numeric_ids(rc.text, rc.gene, db);
    ASSERT_EQ(postprocess::correct_numeric_ids(once, rc.gene, db), once) << rc.kind << "\n" << rc.text;
    const auto a1 = postprocess::normalize_aliases(rc.text, rc.gene, db);
    ASSERT_EQ(postprocess::normalize_aliases(a1, rc.gene, db), a1) << rc.kind << "\n" << rc.text;
  }
}

TEST_F(PostprocessProperty, EveryIdMatchesTheDatabase) {
  for (const auto& rc : cases) {
    const auto out = postprocess::correct_numeric_ids(rc.text, rc.gene, db);
    const auto& ids = db.at(rc.gene);
    const auto spans = postprocess::detect_id_spans(out);
    ASSERT_FALSE(spans.empty()) << rc.kind;
    for (const auto& s : spans) {
      ASSERT_EQ(s.text, s.kind == postprocess::IdKind::kEnsembl ? ids.ensembl_id : ids.hgnc_id)
          << rc.kind << "\n" << out;
    }
  }
}

TEST_F(PostprocessProperty, TextOutsideEditsIsPreserved) {
  for (const auto& rc : cases) {
    postprocess::ChangeLog log;
    const auto out = postprocess::correct_numeric_ids(rc.text, rc.gene, db, {}, &log);
    // Replaying the log over the input reproduces the output, so nothing
    // outside the logged spans moved.
    std::string replay;
    std::size_t pos = 0;
    for (const auto& ch : log) {
      if (ch.kind == "append") continue;
      ASSERT_GE(ch.start, pos);
      ASSERT_EQ(rc.text.substr(ch.start, ch.end - ch.start), ch.before);
      replay += rc.text.substr(pos, ch.start - pos) + ch.after;
      pos = ch.end;
    }
    replay += rc.text.substr(pos);
    if (std::none_of(log.begin(), log.end(), [](const auto& ch) { return ch.kind == "append"; })) {
      ASSERT_EQ(replay, out) << rc.kind;
    } else {
      ASSERT_EQ(out.rfind(replay, 0), 0u) << rc.kind;
    }

    const auto deleted = postprocess::alias_mentions(rc.text, rc.gene);
    const auto aliased = postprocess::normalize_aliases(rc.text, rc.gene, db);
    // Every byte not inside a deleted region survives, in order.
    std::string kept;
    std::size_t at = 0;
    for (const auto& span : deleted) {
      kept += rc.text.substr(at, span.begin - at);
      at = span.end;
    }
    kept += rc.text.substr(at);
    std::size_t j = 0;
    for (char ch : aliased) {
      if (j < kept.size() && kept[j] == ch) ++j;
    }
    ASSERT_EQ(j, kept.size()) << rc.kind << "\n" << rc.text << "\n" << aliased;
  }
}

TEST_F(PostprocessProperty, StepOrderDoesNotMatter) {
  for (const auto& rc : cases) {
    bool ids_in_aliases = false;
    for (const auto& span : postprocess::alias_mentions(rc.text, rc.gene)) {
      const auto region = rc.text.substr(span.begin, span.end - span.begin);
      ids_in_aliases = ids_in_aliases || !postprocess::detect_id_spans(region).empty();
    }
    if (ids_in_aliases) continue;
    const auto ids_first = postprocess::normalize_aliases(
        postprocess::correct_numeric_ids(rc.text, rc.gene, db), rc.gene, db);
    const auto aliases_first = postprocess::correct_numeric_ids(
        postprocess::normalize_aliases(rc.text, rc.gene, db), rc.gene, db);
    ASSERT_EQ(ids_first, aliases_first) << rc.kind << "\n" << rc.text;
  }
}

// ---------------------------------------------------------------------------
// Embedding evaluation

TEST(EmbedProperty, NmiSymmetricRelabelInvariantAndMatchesDirectCount) {
  Gen gen(501);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = gen.size(1, 60);
    const auto a = gen.labels(n, gen.size(1, 5));
    const auto b = gen.labels(n, gen.size(1, 5));
    const double v = embed::nmi(a, b);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0 + 1e-12);
    ASSERT_NEAR(embed::nmi(b, a), v, 1e-12);
    ASSERT_NEAR(oracle::direct_nmi(a, b), v, 1e-12) << "case " << c;
    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    gen.shuffle(perm);
    auto relabeled = a;
    for (auto& l : relabeled) l = perm[l] + 100;
    ASSERT_EQ(embed::nmi(relabeled, b), v) << "case " << c;
  }
}

TEST(EmbedProperty, LeidenReachesTheBruteForceOptimum) {
  for (const auto& [name, g] : testing::small_graph_suite()) {
    if (g.edges().empty()) continue;
    const auto best = oracle::brute_force_max_modularity(g);
    const auto got = embed::leiden(g, {});
    EXPECT_NEAR(embed::modularity(g, got.partition), best.quality, 1e-9) << name;
  }
}

TEST(EmbedProperty, LeidenQualityNeverDropsAndCommunitiesAreConnected) {
  Gen gen(502);
  for (int c = 0; c < 30; ++c) {
    const std::size_t n = gen.size(5, 120);
    const auto g = gen.random_graph(n, gen.real(0.02, 0.2), gen.coin());
    embed::LeidenOptions o;
    o.seed = gen.rng().next();
    const auto r = embed::leiden(g, o);
    for (std::size_t i = 1; i < r.level_quality.size(); ++i) {
      ASSERT_GE(r.level_quality[i], r.level_quality[i - 1] - 1e-12) << "case " << c;
    }
    ASSERT_TRUE(embed::communities_connected(g, r.partition)) << "case " << c;
    ASSERT_NEAR(embed::modularity(g, r.partition), oracle::matrix_modularity(g, r.partition.assignment()),
                1e-9);
  }
}

TEST(EmbedProperty, OraMatchesEnumeration) {
  Gen gen(503);
  for (int c = 0; c < 200; ++c) {
    const std::size_t universe_size = gen.size(1, 12);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < universe_size; ++i) names.push_back("G" + std::to_string(i));
    const std::set<std::string> universe(names.begin(), names.end());
    std::set<std::string> cluster, set;
    for (const auto& n : names) {
      if (gen.coin()) cluster.insert(n);
      if (gen.coin()) set.insert(n);
    }
    std::size_t overlap = 0;
    for (const auto& g : cluster) overlap += set.count(g);
    // Gene names are exchangeable, so enumerate with the set's genes first.
    const double expected =
        oracle::enumerated_upper_tail(universe_size, set.size(), cluster.size(), overlap);
    ASSERT_NEAR(embed::ora_enrichment(cluster, set, universe), expected, 1e-12) << "case " << c;
  }
}

TEST(EmbedProperty, TopPathwaysIsAPrefixOfTheFullSort) {
  Gen gen(504);
  for (int c = 0; c < 100; ++c) {
    std::vector<embed::PathwayResult> results;
    for (std::size_t i = gen.size(0, 25); i > 0; --i) {
      embed::PathwayResult r;
      r.pathway = "P" + std::to_string(gen.size(0, 30));
      r.p_value = gen.coin(0.3) ? 0.5 : gen.real(0, 1);
      r.adjusted_p = gen.coin(0.3) ? 1.0 : r.p_value;
      results.push_back(r);
    }
    const auto full = embed::top_pathways(results, results.size());
    ASSERT_EQ(full.size(), results.size());
    for (std::size_t i = 1; i < full.size(); ++i) {
      ASSERT_TRUE(full[i - 1].adjusted_p < full[i].adjusted_p ||
                  (full[i - 1].adjusted_p == full[i].adjusted_p &&
                   full[i - 1].pathway <= full[i].pathway));
    }
    const std::size_t n = gen.size(0, results.size() + 2);
    const auto top = embed::top_pathways(results, n);
    ASSERT_EQ(top.size(), std::min(n, full.size()));
    for (std::size_t i = 0; i < top.size(); ++i) {
      ASSERT_EQ(top[i].pathway, full[i].pathway);
      ASSERT_EQ(top[i].adjusted_p, full[i].adjusted_p);
    }
  }
}

}  // namespace
}  // namespace genebench
