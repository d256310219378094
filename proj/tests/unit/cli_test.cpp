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

// Runs the built CLI as a subprocess and checks exit codes and output.

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "support/fixtures.hpp"

namespace genebench::testing {
namespace {

std::vector<std::string> protein_grade_args(const TempDir& dir) {
  write_text(dir / "run.conf", "# protein fixture\nmodel = placeholder\n");
  return {"grade",
          "--config", (dir / "run.conf").string(),
          "--set", "task=protein_classification",
          "--set", "corpus=" + fixture_path("protein_eval.jsonl").string(),
          "--set", "outputs=" + fixture_path("protein_eval_outputs.jsonl").string(),
          "--set", "prompt_spec=" + fixture_path("prompt_protein.txt").string(),
          "--set", "output_dir=" + (dir / "out").string(),
          "--set", "model=LLaVA-7B"};
}

TEST(CliTest, MetricsOnIdenticalText) {
  const auto r = run_cli({"metrics", "--candidate", "The cat sat.", "--reference", "the cat sat"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("pair\tbleu\trouge1\n1\t1\t1\n"), std::string::npos) << r.out;
}

TEST(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli({"metrics", "--max-n", "0", "--candidate", "a"}).exit_code, 1);
  EXPECT_EQ(run_cli({"no-such-command"}).exit_code, 1);
}

TEST(CliTest, GradeFixtureRun) {
  TempDir dir;
  const auto r = run_cli(protein_grade_args(dir));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("factual 0.29\tstructural 1\taverage 0.645"), std::string::npos) << r.out;
  const std::string report = read_text(dir / "out" / "report.tsv");
  EXPECT_NE(report.find("LLaVA-7B\t0.29\t1\t0.645\t-\t-\tno\n"), std::string::npos) << report;
}

TEST(CliTest, InvalidConfigExitsOne) {
  TempDir dir;
  auto args = protein_grade_args(dir);
  args.insert(args.end(), {"--set", "parallelism=0"});
  EXPECT_EQ(run_cli(args).exit_code, 1);
  auto missing = protein_grade_args(dir);
  missing.insert(missing.end(), {"--set", "corpus=" + (dir / "absent.jsonl").string()});
  EXPECT_EQ(run_cli(missing).exit_code, 1);
}

TEST(CliTest, MissingInputFileExitsTwo) {
  TempDir dir;
  const auto r = run_cli({"report", "--table", (dir / "absent.tsv").string()});
  EXPECT_EQ(r.exit_code, 2) << r.err;
}

TEST(CliTest, UnreachableProviderExitsThree) {
  TempDir dir;
  write_text(dir / "run.conf", "task = gene_description\n");
  const auto r = run_cli({"infer",
                          "--config", (dir / "run.conf").string(),
                          "--set", "corpus=" + fixture_path("eval_gene.jsonl").string(),
                          "--set", "prompt_spec=" + fixture_path("prompt_gene.txt").string(),
                          "--set", "output_dir=" + (dir / "out").string(),
                          "--set", "provider.endpoint=http://127.0.0.1:1/v1/complete",
                          "--set", "provider.model=m",
                          "--set", "retry.attempts=1"});
  EXPECT_EQ(r.exit_code, 3) << r.err;
}

TEST(CliTest, ReportOverPublishedTable) {
  const auto r = run_cli({"report", "--table", fixture_path("gene_scores.tsv").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("bleu~average\t"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("rouge1~average\t"), std::string::npos);
}

TEST(CliTest, PostprocessSingleText) {
  TempDir dir;
  write_text(dir / "in.txt", "TP53 (ENSG00000000001) guards the genome.");
  const auto r = run_cli({"postprocess", "--db", fixture_path("gene_ids.tsv").string(), "--gene",
                          "TP53", "--input", (dir / "in.txt").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("ENSG00000141510"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("ENSG00000000001"), std::string::npos);
}

TEST(CliTest, EmbedEvalOnTwoBlobs) {
  TempDir dir;
  // Two tight groups of three genes each.
  write_text(dir / "emb.txt",
             "6 2\nA1 1 0\nA2 1 0.05\nA3 0.95 0\nB1 0 1\nB2 0.05 1\nB3 0 0.95\n");
  write_text(dir / "labels.tsv", "A1\tx\nA2\tx\nA3\tx\nB1\ty\nB2\ty\nB3\ty\n");
  write_text(dir / "sets.tsv", "universe\tA1,A2,A3,B1,B2,B3\nPATH_A\tA1,A2,A3\n");
  const auto r = run_cli({"embed-eval", "--embeddings", (dir / "emb.txt").string(), "--labels",
                          (dir / "labels.tsv").string(), "--gene-sets", (dir / "sets.tsv").string(),
                          "--k", "2", "--restarts", "3", "--out", (dir / "out").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("2 communities over 6 genes"), std::string::npos) << r.out;
  const std::string nmi = read_text(dir / "out" / "nmi.tsv");
  EXPECT_NE(nmi.find("# restarts=3\n"), std::string::npos);
  EXPECT_NE(nmi.find("\n6\t1\t"), std::string::npos) << nmi;
  // 3 of 3 drawn from 6 with 3 marked: 1/20, times one set.
  const std::string enr = read_text(dir / "out" / "enrichment.tsv");
  const auto at = enr.find("PATH_A\t3\t");
  ASSERT_NE(at, std::string::npos) << enr;
  EXPECT_NEAR(std::stod(enr.substr(at + 9)), 0.05, 1e-12);
}

TEST(CliTest, FixtureConfigFromRepositoryRoot) {
  // The shipped config uses relative paths; only check that it validates.
  const auto r = run_cli({"grade", "--config", fixture_path("run_gene.conf").string(), "--set",
                          "outputs=/nonexistent/outputs.jsonl"},
                         data_path("..").lexically_normal());
  EXPECT_EQ(r.exit_code, 1) << r.err;
  EXPECT_NE(r.err.find("outputs"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace genebench::testing
