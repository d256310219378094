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

#include "genebench/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "genebench/error.hpp"
#include "genebench/parallel.hpp"
#include "genebench/random.hpp"
#include "genebench/text.hpp"

namespace genebench::corpus {

using nlohmann::json;

void InstructionSample::validate() const {
  if (image_ref.has_value() != is_image_task(task)) {
    fail(ErrorKind::kParse, "sample for " + gene + ": image must be present exactly for image tasks");
  }
  if (text::trim(output).empty()) fail(ErrorKind::kParse, "sample for " + gene + ": empty output");
  if (gene.empty()) fail(ErrorKind::kParse, "sample without a gene");
}

std::string sample_to_json(const InstructionSample& s) {
  json j;
  j["instruction"] = s.instruction;
  j["input"] = s.input;
  j["output"] = s.output;
  j["image"] = s.image_ref ? json(*s.image_ref) : json(nullptr);
  j["task"] = std::string(to_string(s.task));
  j["source"] = std::string(to_string(s.source));
  j["gene"] = s.gene;
  return j.dump();
}

InstructionSample sample_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    InstructionSample s;
    s.instruction = j.at("instruction").get<std::string>();
    s.input = j.value("input", std::string());
    s.output = j.at("output").get<std::string>();
    if (j.contains("image") && !j.at("image").is_null()) s.image_ref = j.at("image").get<std::string>();
    s.task = parse_task(j.at("task").get<std::string>());
    s.source = parse_source(j.at("source").get<std::string>());
    s.gene = j.at("gene").get<std::string>();
    s.validate();
    return s;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("corpus line: ") + e.what());
  }
}

void write_jsonl(std::ostream& out, const std::vector<InstructionSample>& samples) {
  for (const auto& s : samples) out << sample_to_json(s) << '\n';
}

std::vector<InstructionSample> read_jsonl(std::istream& in) {
  std::vector<InstructionSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(sample_from_json(line));
    } catch (const Error& e) {
      fail(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, std::size_t> CorpusManifest::counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& s : samples) {
    const auto it = biotypes.find(s.gene);
    const std::string_view bt = it == biotypes.end() ? "unknown" : to_string(it->second);
    std::string key;
    key.append(to_string(s.task)).append("/").append(to_string(s.source)).append("/").append(bt);
    ++out[key];
  }
  return out;
}

std::vector<std::string> CorpusManifest::genes() const {
  std::set<std::string> g;
  for (const auto& s : samples) g.insert(s.gene);
  return {g.begin(), g.end()};
}

void CorpusManifest::write(const std::filesystem::path& dir, std::string_view stem) const {
  std::filesystem::create_directories(dir);
  const std::string base(stem);
  {
    std::ofstream out(dir / (base + ".jsonl"), std::ios::binary);
    if (!out) fail(ErrorKind::kIo, "cannot write " + (dir / (base + ".jsonl")).string());
    write_jsonl(out, samples);
  }
  json meta;
  meta["build_seed"] = build_seed;
  meta["catalog_version"] = catalog_version;
  meta["samples"] = samples.size();
  meta["counts"] = counts();
  json bt = json::object();
  for (const auto& [g, b] : biotypes) bt[g] = std::string(to_string(b));
  meta["biotypes"] = bt;
  std::ofstream out(dir / (base + ".manifest.json"), std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write manifest in " + dir.string());
  out << meta.dump(2) << '\n';
}

CorpusManifest CorpusManifest::load(const std::filesystem::path& dir, std::string_view stem) {
  const std::string base(stem);
  CorpusManifest m;
  {
    std::ifstream in(dir / (base + ".jsonl"), std::ios::binary);
    if (!in) fail(ErrorKind::kIo, "cannot open " + (dir / (base + ".jsonl")).string());
    m.samples = read_jsonl(in);
  }
  std::ifstream in(dir / (base + ".manifest.json"), std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + (dir / (base + ".manifest.json")).string());
  try {
    const json meta = json::parse(in);
    m.build_seed = meta.at("build_seed").get<std::uint64_t>();
    m.catalog_version = meta.at("catalog_version").get<std::string>();
    for (const auto& [g, b] : meta.at("biotypes").items()) m.biotypes[g] = parse_biotype(b.get<std::string>());
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("manifest: ") + e.what());
  }
  return m;
}

Templates Templates::load(const std::filesystem::path& dir) {
  Templates t;
  auto read = [&](const char* name, std::string& into) {
    std::ifstream in(dir / name);
    if (!in) return;
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string body = ss.str();
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    if (!body.empty()) into = body;
  };
  read("instruction.txt", t.instruction);
  read("rephrase.txt", t.rephrase);
  read("generation.txt", t.generation);
  return t;
}

std::string render_template(std::string_view tmpl, const GeneRecord& record) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.substr(i, 8) == "{symbol}") {
      out += record.symbol;
      i += 8;
    } else if (tmpl.substr(i, 9) == "{summary}") {
      out += record.summary;
      i += 9;
    } else {
      out.push_back(tmpl[i++]);
    }
  }
  return out;
}

namespace {

std::string provider_text(TextProvider& provider, const std::string& prompt,
                          const std::string& symbol) {
  std::string reply;
  try {
    reply = provider.complete(prompt);
  } catch (const Error& e) {
    fail(ErrorKind::kProviderError, "provider failed for " + symbol + ": " + e.what());
  }
  std::string flat = text::collapse_whitespace(reply);
  if (flat.empty()) fail(ErrorKind::kProviderError, "provider returned no text for " + symbol);
  return flat;
}

}  // namespace

InstructionSample build_real_sample(const GeneRecord& record, const Templates& templates,
                                    TextProvider* provider) {
  if (text::trim(record.summary).empty()) {
    fail(ErrorKind::kEmptySummary, "no summary for " + record.symbol);
  }
  InstructionSample s;
  s.instruction = render_template(templates.instruction, record);
  s.task = Task::kGeneDescription;
  s.source = Source::kReal;
  s.gene = record.symbol;
  s.output = provider ? provider_text(*provider, render_template(templates.rephrase, record),
                                      record.symbol)
                      : text::collapse_whitespace(record.summary);
  return s;
}

InstructionSample build_synthetic_sample(const GeneRecord& record, TextProvider& provider,
                                         const Templates& templates) {
  if (record.biotype != Biotype::kProteinCoding) {
    fail(ErrorKind::kBiotypeRejected, record.symbol + " is " +
                                          std::string(to_string(record.biotype)) +
                                          "; synthetic samples are for protein-coding genes only");
  }
  InstructionSample s;
  s.instruction = render_template(templates.instruction, record);
  s.task = Task::kGeneDescription;
  s.source = Source::kSynthetic;
  s.gene = record.symbol;
  s.output = provider_text(provider, render_template(templates.generation, record), record.symbol);
  return s;
}

CorpusManifest merge_corpora(const std::vector<InstructionSample>& real,
                             const std::vector<InstructionSample>& synthetic,
                             const BiotypeLookup& lookup) {
  using Key = std::tuple<std::string, Task, Source>;
  std::map<Key, InstructionSample> kept;
  auto offer = [&](const InstructionSample& s) {
    s.validate();
    Key key{s.gene, s.task, s.source};
    auto [it, inserted] = kept.try_emplace(key, s);
    if (inserted) return;
    const auto& cur = it->second.output;
    if (s.output.size() > cur.size() || (s.output.size() == cur.size() && s.output < cur)) {
      it->second = s;
    }
  };

  CorpusManifest m;
  for (const auto& s : real) {
    if (s.source != Source::kReal) {
      fail(ErrorKind::kPolicyViolation, "synthetic sample for " + s.gene + " in the real corpus");
    }
    offer(s);
  }
  for (const auto& s : synthetic) {
    if (s.source != Source::kSynthetic) {
      fail(ErrorKind::kPolicyViolation, "real sample for " + s.gene + " in the synthetic corpus");
    }
    offer(s);
  }

  for (const auto& [key, s] : kept) {
    const std::string& gene = std::get<0>(key);
    if (m.biotypes.count(gene)) continue;
    try {
      m.biotypes[gene] = lookup(gene);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNotFound) throw;
      if (std::get<2>(key) == Source::kSynthetic || kept.count({gene, std::get<1>(key), Source::kSynthetic})) {
        fail(ErrorKind::kPolicyViolation, "synthetic sample for " + gene + ", which the catalog does not know");
      }
      fail(ErrorKind::kNotFound, "gene not in catalog: " + gene);
    }
  }
  for (auto& [key, s] : kept) {
    if (s.source == Source::kSynthetic && m.biotypes.at(s.gene) != Biotype::kProteinCoding) {
      fail(ErrorKind::kPolicyViolation,
           "synthetic sample for " + s.gene + ", which is " + std::string(to_string(m.biotypes.at(s.gene))));
    }
    m.samples.push_back(std::move(s));
  }
  return m;
}

InstructionSample build_mllm_sample(const std::string& image_ref, const std::string& instruction,
                                    const std::string& answer, Task task,
                                    const std::string& gene) {
  if (!is_image_task(task)) {
    fail(ErrorKind::kBadTask, std::string(to_string(task)) + " samples do not take an image");
  }
  const bool url = (image_ref.starts_with("http://") || image_ref.starts_with("https://")) &&
                   image_ref.find_first_of(" \t\r\n") == std::string::npos &&
                   image_ref.size() > image_ref.find("://") + 3;
  if (!url) {
    std::error_code ec;
    if (image_ref.empty() || !std::filesystem::is_regular_file(image_ref, ec)) {
      fail(ErrorKind::kMissingImage, "image not found: " + image_ref);
    }
  }
  InstructionSample s;
  s.instruction = instruction;
  s.image_ref = image_ref;
  s.output = answer;
  s.task = task;
  s.source = Source::kReal;
  s.gene = gene.empty() ? answer : gene;
  s.validate();
  return s;
}

std::string marker_answer(const MarkerRelation& relation) {
  relation.validate();
  return relation.is_marker
             ? "Yes. " + relation.gene + " is a marker gene of " + relation.cell_type + "."
             : "No. " + relation.gene + " is not a marker gene of " + relation.cell_type + ".";
}

std::pair<CorpusManifest, CorpusManifest> split_eval(const CorpusManifest& manifest,
                                                     std::size_t n, std::uint64_t seed) {
  std::vector<std::string> genes = manifest.genes();
  if (n > genes.size()) {
    fail(ErrorKind::kNTooLarge, "asked for " + std::to_string(n) + " eval genes, corpus has " +
                                    std::to_string(genes.size()));
  }
  Rng rng(seed);
  rng.shuffle(genes);
  const std::set<std::string> held(genes.begin(), genes.begin() + static_cast<std::ptrdiff_t>(n));

  std::pair<CorpusManifest, CorpusManifest> out;
  for (auto* m : {&out.first, &out.second}) {
    m->build_seed = manifest.build_seed;
    m->catalog_version = manifest.catalog_version;
  }
  for (const auto& s : manifest.samples) {
    CorpusManifest& dst = held.count(s.gene) ? out.second : out.first;
    dst.samples.push_back(s);
    if (const auto it = manifest.biotypes.find(s.gene); it != manifest.biotypes.end()) {
      dst.biotypes[s.gene] = it->second;
    }
  }
  return out;
}

BuildResult build_corpus(const std::vector<std::string>& symbols, CatalogClient& client,
                         const Templates& templates, TextProvider* rephraser,
                         TextProvider* generator, std::uint64_t seed, unsigned threads) {
  struct Slot {
    std::optional<GeneRecord> record;
    std::optional<InstructionSample> real;
    std::optional<InstructionSample> synthetic;
    std::vector<std::string> problems;
  };
  std::vector<std::string> unique(symbols);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  std::vector<Slot> slots(unique.size());

  parallel_for(unique.size(), threads, [&](std::size_t i) {
    Slot& slot = slots[i];
    try {
      slot.record = client.fetch(unique[i]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNotFound && e.kind() != ErrorKind::kMalformedResponse) throw;
      slot.problems.push_back(e.what());
      return;
    }
    try {
      slot.real = build_real_sample(*slot.record, templates, rephraser);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kEmptySummary && e.kind() != ErrorKind::kProviderError) throw;
      slot.problems.push_back(e.what());
    }
    if (generator && slot.record->biotype == Biotype::kProteinCoding) {
      try {
        slot.synthetic = build_synthetic_sample(*slot.record, *generator, templates);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kProviderError) throw;
        slot.problems.push_back(e.what());
      }
    }
  });

  BuildResult result;
  std::vector<InstructionSample> real;
  std::vector<InstructionSample> synthetic;
  std::map<std::string, Biotype> biotypes;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    Slot& slot = slots[i];
    for (const auto& p : slot.problems) {
      spdlog::warn("skipping {}: {}", unique[i], p);
      result.skipped.emplace_back(unique[i], p);
    }
    if (slot.record) biotypes[slot.record->symbol] = slot.record->biotype;
    if (slot.real) real.push_back(std::move(*slot.real));
    if (slot.synthetic) synthetic.push_back(std::move(*slot.synthetic));
  }
  result.manifest = merge_corpora(real, synthetic, [&](std::string_view gene) {
    const auto it = biotypes.find(std::string(gene));
    if (it == biotypes.end()) fail(ErrorKind::kNotFound, "gene not in catalog: " + std::string(gene));
    return it->second;
  });
  result.manifest.build_seed = seed;
  result.manifest.catalog_version = client.version();
  return result;
}

}  // namespace genebench::corpus
