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

#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "genebench/catalog.hpp"
#include "genebench/corpus.hpp"
#include "genebench/error.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

namespace genebench::corpus {
namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

GeneRecord record(std::string symbol, Biotype biotype, std::string summary = "S") {
  GeneRecord r;
  r.symbol = std::move(symbol);
  r.biotype = biotype;
  r.summary = std::move(summary);
  return r;
}

InstructionSample sample(std::string gene, Source source, std::string output = "text") {
  InstructionSample s;
  s.instruction = "Describe " + gene;
  s.output = std::move(output);
  s.source = source;
  s.gene = std::move(gene);
  return s;
}

BiotypeLookup lookup_from(std::map<std::string, Biotype> table) {
  return [table](std::string_view g) {
    const auto it = table.find(std::string(g));
    if (it == table.end()) fail(ErrorKind::kNotFound, "unknown " + std::string(g));
    return it->second;
  };
}

FunctionProvider uppercase() {
  return FunctionProvider([](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
  });
}

TEST(SampleJsonTest, RoundTripAndLayout) {
  InstructionSample s = sample("TP53", Source::kReal, "TP53 encodes p53.");
  const std::string line = sample_to_json(s);
  EXPECT_EQ(line,
            R"({"gene":"TP53","image":null,"input":"","instruction":"Describe TP53",)"
            R"("output":"TP53 encodes p53.","source":"real","task":"gene_description"})");
  EXPECT_EQ(sample_from_json(line), s);
  std::stringstream buf;
  write_jsonl(buf, {s, s});
  EXPECT_EQ(read_jsonl(buf).size(), 2u);
}

TEST(SampleJsonTest, RejectsInconsistentRows) {
  EXPECT_EQ(kind_of([] { sample_from_json("{}"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] {
              sample_from_json(R"({"instruction":"i","output":"o","image":"x.png",)"
                               R"("task":"gene_description","source":"real","gene":"G"})");
            }),
            ErrorKind::kParse);
}

TEST(TemplatesTest, RenderAndLoad) {
  const auto r = record("GLI1", Biotype::kProteinCoding, "GLI1 is a factor.");
  EXPECT_EQ(render_template("{symbol}: {summary} ({symbol})", r), "GLI1: GLI1 is a factor. (GLI1)");
  const auto shipped = Templates::load(testing::data_path("templates"));
  EXPECT_NE(shipped.rephrase.find("{summary}"), std::string::npos);
  testing::TempDir dir;
  testing::write_text(dir / "generation.txt", "Gen {symbol}\n");
  const auto t = Templates::load(dir.path());
  EXPECT_EQ(t.generation, "Gen {symbol}");
  EXPECT_EQ(t.instruction, Templates{}.instruction);
}

TEST(BuildRealSampleTest, Examples) {
  const Templates t;
  const auto s = build_real_sample(record("TP53", Biotype::kProteinCoding, "S"), t);
  EXPECT_EQ(s.output, "S");
  EXPECT_EQ(s.task, Task::kGeneDescription);
  EXPECT_EQ(s.source, Source::kReal);
  EXPECT_EQ(kind_of([&] { build_real_sample(record("X", Biotype::kProteinCoding, " "), t); }),
            ErrorKind::kEmptySummary);
  auto up = uppercase();
  Templates pass_through;
  pass_through.rephrase = "{summary}";
  EXPECT_EQ(build_real_sample(record("TP53", Biotype::kProteinCoding, "S"), pass_through, &up).output,
            "S");
  EXPECT_EQ(build_real_sample(record("TP53", Biotype::kProteinCoding, "abc"), pass_through, &up)
                .output,
            "ABC");
}

TEST(BuildRealSampleTest, FlattensToOneParagraph) {
  const auto s =
      build_real_sample(record("G", Biotype::kProteinCoding, "Line one.\n\n  Line two. "), {});
  EXPECT_EQ(s.output, "Line one. Line two.");
}

TEST(BuildRealSampleTest, ProviderFailureIsProviderError) {
  FunctionProvider broken([](std::string_view) -> std::string {
    fail(ErrorKind::kProviderUnreachable, "down");
  });
  FunctionProvider empty([](std::string_view) { return std::string("  "); });
  const auto r = record("G", Biotype::kProteinCoding, "S");
  EXPECT_EQ(kind_of([&] { build_real_sample(r, {}, &broken); }), ErrorKind::kProviderError);
  EXPECT_EQ(kind_of([&] { build_real_sample(r, {}, &empty); }), ErrorKind::kProviderError);
}

TEST(BuildSyntheticSampleTest, Examples) {
  std::vector<std::string> prompts;
  FunctionProvider gen([&](std::string_view p) {
    prompts.emplace_back(p);
    return std::string("generated");
  });
  const Templates t;
  const auto s = build_synthetic_sample(record("TP53", Biotype::kProteinCoding), gen, t);
  EXPECT_EQ(s.source, Source::kSynthetic);
  EXPECT_EQ(s.output, "generated");
  build_synthetic_sample(record("EGFR", Biotype::kProteinCoding), gen, t);
  EXPECT_EQ(prompts[0], render_template(t.generation, record("TP53", Biotype::kProteinCoding)));
  EXPECT_EQ(kind_of([&] { build_synthetic_sample(record("P", Biotype::kPseudogene), gen, t); }),
            ErrorKind::kBiotypeRejected);
  EXPECT_EQ(kind_of([&] { build_synthetic_sample(record("N", Biotype::kNonCoding), gen, t); }),
            ErrorKind::kBiotypeRejected);
}

TEST(MergeTest, DisjointMerge) {
  const auto lookup = lookup_from({{"A", Biotype::kProteinCoding},
                                   {"B", Biotype::kProteinCoding},
                                   {"P", Biotype::kPseudogene}});
  const auto m = merge_corpora(
      {sample("A", Source::kReal), sample("B", Source::kReal), sample("P", Source::kReal)},
      {sample("A", Source::kSynthetic), sample("B", Source::kSynthetic)}, lookup);
  EXPECT_EQ(m.samples.size(), 5u);
  EXPECT_EQ(m.samples[0].gene, "A");
  EXPECT_EQ(m.samples[0].source, Source::kReal);
  EXPECT_EQ(m.samples[1].source, Source::kSynthetic);
  EXPECT_EQ(m.biotypes.at("P"), Biotype::kPseudogene);
  EXPECT_EQ(m.counts().at("gene_description/synthetic/protein_coding"), 2u);
  EXPECT_EQ(m.genes(), (std::vector<std::string>{"A", "B", "P"}));
}

TEST(MergeTest, PolicyViolations) {
  const auto lookup = lookup_from({{"P", Biotype::kPseudogene}, {"A", Biotype::kProteinCoding}});
  EXPECT_EQ(kind_of([&] { merge_corpora({}, {sample("P", Source::kSynthetic)}, lookup); }),
            ErrorKind::kPolicyViolation);
  EXPECT_EQ(kind_of([&] { merge_corpora({sample("A", Source::kSynthetic)}, {}, lookup); }),
            ErrorKind::kPolicyViolation);
  EXPECT_EQ(kind_of([&] { merge_corpora({}, {sample("Z", Source::kSynthetic)}, lookup); }),
            ErrorKind::kPolicyViolation);
  EXPECT_EQ(kind_of([&] { merge_corpora({sample("Z", Source::kReal)}, {}, lookup); }),
            ErrorKind::kNotFound);
}

TEST(MergeTest, DuplicatesKeepLongestThenSmallest) {
  const auto lookup = lookup_from({{"A", Biotype::kProteinCoding}});
  const auto m = merge_corpora({}, {sample("A", Source::kSynthetic, "short"),
                                    sample("A", Source::kSynthetic, "the longest"),
                                    sample("A", Source::kSynthetic, "the longesa")},
                               lookup);
  ASSERT_EQ(m.samples.size(), 1u);
  EXPECT_EQ(m.samples[0].output, "the longesa");
}

TEST(ManifestTest, WriteAndLoad) {
  testing::TempDir dir;
  const auto lookup = lookup_from({{"A", Biotype::kProteinCoding}, {"N", Biotype::kNonCoding}});
  auto m = merge_corpora({sample("A", Source::kReal), sample("N", Source::kReal)},
                         {sample("A", Source::kSynthetic)}, lookup);
  m.build_seed = 99;
  m.catalog_version = "v1";
  m.write(dir.path(), "train");
  EXPECT_TRUE(std::filesystem::exists(dir / "train.jsonl"));
  const auto back = CorpusManifest::load(dir.path(), "train");
  EXPECT_EQ(back.samples, m.samples);
  EXPECT_EQ(back.biotypes, m.biotypes);
  EXPECT_EQ(back.build_seed, 99u);
  EXPECT_EQ(back.catalog_version, "v1");
  EXPECT_EQ(back.counts(), m.counts());
}

TEST(MllmSampleTest, Examples) {
  testing::TempDir dir;
  const auto image = (dir / "tp53.png").string();
  testing::write_text(image, "png");
  const auto s = build_mllm_sample(image, "What protein is shown?", "TP53",
                                   Task::kProteinClassification);
  EXPECT_EQ(s.image_ref, image);
  EXPECT_EQ(s.output, "TP53");
  EXPECT_EQ(s.gene, "TP53");
  EXPECT_EQ(kind_of([&] {
              build_mllm_sample((dir / "absent.png").string(), "q", "TP53",
                                Task::kProteinClassification);
            }),
            ErrorKind::kMissingImage);
  EXPECT_EQ(kind_of([&] { build_mllm_sample(image, "q", "TP53", Task::kGeneDescription); }),
            ErrorKind::kBadTask);
  EXPECT_NO_THROW(build_mllm_sample("https://example.org/p.png", "q", "TP53",
                                    Task::kProteinClassification));
  EXPECT_EQ(kind_of([] {
              build_mllm_sample("https://", "q", "TP53", Task::kProteinClassification);
            }),
            ErrorKind::kMissingImage);
}

TEST(MllmSampleTest, MarkerAnswers) {
  EXPECT_EQ(marker_answer({"CD4", "CD4 T cell", true}), "Yes. CD4 is a marker gene of CD4 T cell.");
  EXPECT_EQ(marker_answer({"INS", "T cell", false}), "No. INS is not a marker gene of T cell.");
}

CorpusManifest hundred_genes() {
  std::vector<InstructionSample> real;
  std::map<std::string, Biotype> table;
  for (int i = 0; i < 100; ++i) {
    const std::string g = "G" + std::to_string(i);
    real.push_back(sample(g, Source::kReal));
    table[g] = Biotype::kProteinCoding;
  }
  return merge_corpora(real, {}, lookup_from(table));
}

TEST(SplitTest, Examples) {
  const auto m = hundred_genes();
  const auto [train, eval] = split_eval(m, 20, 7);
  EXPECT_EQ(eval.genes().size(), 20u);
  EXPECT_EQ(train.genes().size(), 80u);
  const auto again = split_eval(m, 20, 7);
  EXPECT_EQ(again.second.samples, eval.samples);
  EXPECT_NE(split_eval(m, 20, 8).second.genes(), eval.genes());

  const auto none = split_eval(m, 0, 7);
  EXPECT_TRUE(none.second.samples.empty());
  EXPECT_EQ(none.first.samples, m.samples);
  EXPECT_EQ(kind_of([&] { split_eval(m, 101, 7); }), ErrorKind::kNTooLarge);
}

TEST(BuildCorpusTest, FixtureCatalog) {
  auto src = FixtureSource::load(testing::fixture_path("catalog.json").string());
  CatalogClient client(src);
  FunctionProvider gen([](std::string_view p) { return "Synthetic: " + std::string(p); });
  const std::vector<std::string> symbols{"TP53", "MALAT1", "PTENP1", "C1orf216", "NOSUCHGENE",
                                         "TP53"};
  const auto r = build_corpus(symbols, client, {}, nullptr, &gen, 5, 4);
  // TP53 real + synthetic, MALAT1, PTENP1 and a synthetic sample for
  // C1orf216, which is protein-coding but has no summary of its own.
  EXPECT_EQ(r.manifest.samples.size(), 5u);
  ASSERT_EQ(r.skipped.size(), 2u);
  EXPECT_EQ(r.skipped[0].first, "C1orf216");
  EXPECT_EQ(r.skipped[1].first, "NOSUCHGENE");
  EXPECT_EQ(r.manifest.catalog_version, "fixture-2024.1");
  EXPECT_EQ(r.manifest.build_seed, 5u);
  for (const auto& s : r.manifest.samples) {
    if (s.source == Source::kSynthetic) {
      EXPECT_TRUE(s.gene == "TP53" || s.gene == "C1orf216") << s.gene;
    } else {
      EXPECT_NE(s.gene, "C1orf216");
    }
  }
}

TEST(BuildCorpusTest, ThreadCountDoesNotChangeResult) {
  const auto records = testing::synthetic_catalog(40);
  auto src = FixtureSource::from_records("syn-1", records);
  FunctionProvider gen([](std::string_view p) { return "Synthetic: " + std::string(p); });
  std::vector<std::string> symbols;
  for (const auto& r : records) symbols.push_back(r.symbol);
  CatalogClient one_client(src);
  CatalogClient many_client(src);
  const auto one = build_corpus(symbols, one_client, {}, nullptr, &gen, 1, 1);
  const auto many = build_corpus(symbols, many_client, {}, nullptr, &gen, 1, 8);
  EXPECT_EQ(one.manifest.samples, many.manifest.samples);
  EXPECT_EQ(one.manifest.samples.size(), 60u);
}

}  // namespace
}  // namespace genebench::corpus
