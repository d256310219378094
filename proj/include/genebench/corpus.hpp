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

#ifndef GENEBENCH_CORPUS_HPP_
#define GENEBENCH_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genebench/catalog.hpp"
#include "genebench/provider.hpp"
#include "genebench/types.hpp"

namespace genebench::corpus {

// One instruction-tuning row. On disk (JSON lines, one object per line):
//   {"instruction": ..., "input": ..., "output": ..., "image": null | "...",
//    "task": "gene_description", "source": "real", "gene": "TP53"}
struct InstructionSample {
  std::string instruction;
  std::string input;
  std::optional<std::string> image_ref;
  std::string output;
  Task task = Task::kGeneDescription;
  Source source = Source::kReal;
  std::string gene;

  // Throws kParse unless the image is present exactly for image tasks and
  // the output and gene are non-empty.
  void validate() const;
  bool operator==(const InstructionSample&) const = default;
};

std::string sample_to_json(const InstructionSample& s);
InstructionSample sample_from_json(std::string_view line);
void write_jsonl(std::ostream& out, const std::vector<InstructionSample>& samples);
std::vector<InstructionSample> read_jsonl(std::istream& in);

struct CorpusManifest {
  std::vector<InstructionSample> samples;
  std::map<std::string, Biotype> biotypes;  // every sample's gene
  std::uint64_t build_seed = 0;
  std::string catalog_version;

  // Keyed "task/source/biotype"; the values sum to samples.size().
  std::map<std::string, std::size_t> counts() const;
  std::vector<std::string> genes() const;  // distinct, sorted
  // <dir>/<stem>.jsonl and <dir>/<stem>.manifest.json.
  void write(const std::filesystem::path& dir, std::string_view stem) const;
  static CorpusManifest load(const std::filesystem::path& dir, std::string_view stem);
};

// Prompt texts with "{symbol}" (and, for rephrasing, "{summary}")
// placeholders.
struct Templates {
  std::string instruction = "Describe the function of the human gene {symbol} in one paragraph.";
  std::string rephrase =
      "Rephrase the following description of gene {symbol} as a single-paragraph functional "
      "summary.\n\n{summary}";
  std::string generation = "Write a single-paragraph functional summary of gene {symbol}.";

  // Reads instruction.txt, rephrase.txt and generation.txt from dir; files
  // that are absent keep the defaults.
  static Templates load(const std::filesystem::path& dir);
};

std::string render_template(std::string_view tmpl, const GeneRecord& record);

// Output is the summary, or the provider's rephrasing of it, collapsed into
// a single paragraph. Throws kEmptySummary, kProviderError.
InstructionSample build_real_sample(const GeneRecord& record, const Templates& templates,
                                    TextProvider* provider = nullptr);

// Throws kBiotypeRejected for non-protein-coding genes, kProviderError when
// the provider fails or returns nothing.
InstructionSample build_synthetic_sample(const GeneRecord& record, TextProvider& provider,
                                         const Templates& templates);

// Returns the biotype the catalog holds for a symbol; throws kNotFound.
using BiotypeLookup = std::function<Biotype(std::string_view)>;

// Keeps at most one sample per (task, gene, source), preferring the longest
// output (then the lexicographically smaller one), and sorts by gene, task,
// source. Throws kPolicyViolation for a mislabelled source or a synthetic
// sample whose gene is not protein-coding (or not in the catalog).
CorpusManifest merge_corpora(const std::vector<InstructionSample>& real,
                             const std::vector<InstructionSample>& synthetic,
                             const BiotypeLookup& lookup);

struct BuildResult {
  CorpusManifest manifest;
  std::vector<std::pair<std::string, std::string>> skipped;  // (symbol, reason)
};

// Fetches every symbol, builds a real sample per gene with a summary and,
// when a generator is given, a synthetic sample per protein-coding gene,
// then merges. Genes that fail (no summary, provider error, unknown symbol)
// are skipped and reported. Runs on `threads` workers; the result does not
// depend on scheduling.
BuildResult build_corpus(const std::vector<std::string>& symbols, CatalogClient& client,
                         const Templates& templates, TextProvider* rephraser,
                         TextProvider* generator, std::uint64_t seed, unsigned threads = 1);

// answer: the protein name for protein_classification; for marker_gene use
// marker_answer(). Throws kBadTask, kMissingImage.
InstructionSample build_mllm_sample(const std::string& image_ref, const std::string& instruction,
                                    const std::string& answer, Task task,
                                    const std::string& gene = {});

// "Yes. CD4 is a marker gene of CD4 T cell." / "No. ..."
std::string marker_answer(const MarkerRelation& relation);

// Gene-level split: exactly n distinct genes (chosen by a seeded shuffle of
// the sorted gene list) go to eval with all their samples. Throws kNTooLarge.
std::pair<CorpusManifest, CorpusManifest> split_eval(const CorpusManifest& manifest,
                                                     std::size_t n, std::uint64_t seed);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

struct PlotStyle {
  int width = 512;
  int height = 512;
  int margin = 24;
  int point_radius = 6;
  Rgb background{255, 255, 255};
  Rgb low{0x44, 0x01, 0x54};
  Rgb high{0xFD, 0xE7, 0x25};
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Pixel centre a cell is drawn at (x to the right, y up).
std::pair<int, int> plot_position(std::span<const Point2> coords, std::size_t i,
                                  const PlotStyle& style);

// Linear map of value from [lo, hi] onto [low, high]; lo == hi gives low.
Rgb color_for(double value, double lo, double hi, const PlotStyle& style);

// Scatter of cells as filled discs coloured by expression, higher values
// drawn on top; gene goes into the PNG Title text chunk. Byte-identical for
// identical inputs. Throws kLengthMismatch, kNonFiniteExpression.
void render_spatial_plot(std::span<const Point2> coords, std::span<const double> expression,
                         std::string_view gene, const PlotStyle& style,
                         const std::filesystem::path& out);

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major, top row first
  Rgb at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

RgbImage read_png(const std::filesystem::path& path);

}  // namespace genebench::corpus

#endif  // GENEBENCH_CORPUS_HPP_
