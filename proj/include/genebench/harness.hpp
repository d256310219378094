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

#ifndef GENEBENCH_HARNESS_HPP_
#define GENEBENCH_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genebench/clock.hpp"
#include "genebench/grading.hpp"
#include "genebench/provider.hpp"
#include "genebench/text_metrics.hpp"

namespace genebench::harness {

// Flat key=value settings. Lines are "key = value"; blank lines and lines
// starting with '#' are ignored. Later assignments win.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  // "key=value"; throws kConfigInvalid when there is no '='.
  void set(std::string_view assignment);
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

  bool has(std::string_view key) const { return values_.count(std::string(key)) > 0; }
  std::string get(std::string_view key, std::string_view fallback = {}) const;
  // Throw kConfigInvalid when present but unparseable.
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  // "# key=value" per entry, sorted by key.
  std::string provenance() const;

 private:
  std::map<std::string, std::string> values_;
};

// Validated view of a Config for inference and grading.
//
// Keys: task, corpus (eval set), outputs, prompt_spec, output_dir, seed,
// parallelism, model, finetuned, grader.function_recall_threshold,
// grader.protein_scorer (substring | subsequence), bleu.max_n, rouge.k,
// retry.attempts, retry.backoff, provider.endpoint, provider.model,
// provider.timeout, provider.rate_limit.
struct RunConfig {
  Task task = Task::kGeneDescription;
  std::filesystem::path corpus;
  std::filesystem::path outputs;  // empty: <output_dir>/outputs.jsonl
  std::filesystem::path prompt_spec;
  std::filesystem::path output_dir;
  std::optional<ProviderSpec> provider;
  grading::GraderConfig grader;
  std::uint64_t seed = 0;
  unsigned parallelism = 1;
  std::string model = "model";
  bool finetuned = false;
  int bleu_max_n = 4;
  int rouge_k = 1;
  int retry_attempts = 3;
  double retry_backoff = 1.0;  // seconds before the second attempt; doubles
  Config source;

  // Throws kConfigInvalid for bad values or missing paths (the outputs path
  // is checked only when require_outputs is set).
  static RunConfig from(const Config& config, bool require_outputs = false);
  std::filesystem::path outputs_path() const;
};

// An eval row: what the model is asked plus the gold answer. On disk, JSON
// lines {"id", "task", "prompt", "image"?, "output"?, "gold"} with gold an
// object of GeneRecord fields, a protein-name string, or {"gene",
// "cell_type", "is_marker"}.
struct EvalRow {
  grading::EvalSample sample;
  std::optional<std::string> image;
};

std::string eval_row_to_json(const EvalRow& row);
EvalRow eval_row_from_json(std::string_view line);
std::vector<EvalRow> read_eval_set(const std::filesystem::path& path);
void write_eval_set(std::ostream& out, const std::vector<EvalRow>& rows);

// The gene an eval row is about.
std::string gold_gene(const grading::EvalSample& sample);

// {"id", "output", "error": null | "..."}
struct OutputRow {
  std::string id;
  std::string output;
  std::optional<std::string> error;
  bool operator==(const OutputRow&) const = default;
};

std::string output_row_to_json(const OutputRow& row);
OutputRow output_row_from_json(std::string_view line);
std::vector<OutputRow> read_outputs(const std::filesystem::path& path);
void write_outputs(std::ostream& out, const std::vector<OutputRow>& rows);

struct InferenceOptions {
  unsigned parallelism = 1;
  int attempts = 3;
  double backoff = 1.0;
  Clock* clock = nullptr;  // system clock when null
};

// One output per row, in id order. A row whose every attempt fails gets an
// empty output and an error marker; if the failures were all connection
// failures the whole run stops with kProviderUnreachable.
std::vector<OutputRow> run_inference(const std::vector<EvalRow>& rows, TextProvider& provider,
                                     const InferenceOptions& options);

// Reads the eval set, calls the configured HTTP provider and writes the
// outputs file; returns its path. Throws kConfigInvalid without a provider.
std::filesystem::path run_inference(const RunConfig& config);

struct BenchmarkRow {
  std::string model;
  double factual = 0.0;
  double structural = 0.0;
  double average = 0.0;  // always (factual + structural) / 2
  std::optional<double> bleu;
  std::optional<double> rouge1;
  bool finetuned = false;

  static BenchmarkRow make(std::string model, double factual, double structural,
                           std::optional<double> bleu, std::optional<double> rouge1,
                           bool finetuned);
};

struct SampleDetail {
  grading::SampleScore score;
  std::optional<double> bleu;
  std::optional<double> rouge1;
  std::optional<std::string> error;
};

struct GradingResult {
  grading::GradeReport report;
  BenchmarkRow row;
  std::vector<SampleDetail> details;  // id order
};

struct GradingOptions {
  grading::GraderConfig grader;
  std::string model = "model";
  bool finetuned = false;
  int bleu_max_n = 4;
  int rouge_k = 1;
  unsigned parallelism = 1;
};

// Grades outputs against the eval rows. BLEU and ROUGE are computed against
// the gold summary for gene_description rows only; the row carries their
// means when every row is of that task. Throws kMisaligned unless the ids
// match one to one.
GradingResult run_grading(const std::vector<EvalRow>& rows, const std::vector<OutputRow>& outputs,
                          const grading::PromptSpec& spec, const GradingOptions& options);

// Shortest decimal that round-trips.
std::string format_number(double v);

// Tab-separated benchmark table (rows as given), then a correlation section
// with Pearson(BLEU, Average) and Pearson(ROUGE1, Average), or a notice when
// fewer than two rows carry the metric. `header` lines (e.g. a config's
// provenance) go first.
void emit_report(const std::vector<BenchmarkRow>& rows, std::ostream& out,
                 std::string_view header = {});

// Reads a benchmark table as written by emit_report (lines starting with
// '#' and anything after the first blank line are ignored). A "-" metric is
// absent. The stored average must match (factual + structural) / 2 within
// 1e-3 and is then replaced by the exact value. Throws kParse.
std::vector<BenchmarkRow> read_table(std::istream& in);
std::vector<BenchmarkRow> load_table(const std::filesystem::path& path);

void write_details(std::ostream& out, const GradingResult& result);

// Worksheet for auditing the automatic grades by hand: one row per sample
// with the output, the gold, the automatic scores and empty columns for the
// human scores.
void write_rubric(std::ostream& out, const std::vector<EvalRow>& rows,
                  const std::vector<OutputRow>& outputs, const GradingResult& result);

// grade-and-report step of a run: writes report.tsv and details.tsv (plus
// rubric.tsv when asked) to the output directory.
GradingResult grade_run(const RunConfig& config, bool rubric);

// Inference with the given provider, then grade_run. Used for end-to-end
// runs with an in-process provider.
GradingResult full_run(const RunConfig& config, TextProvider& provider, Clock* clock = nullptr);

}  // namespace genebench::harness

#endif  // GENEBENCH_HARNESS_HPP_
