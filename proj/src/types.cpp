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

#include "genebench/types.hpp"

#include <algorithm>
#include <set>

#include "genebench/error.hpp"
#include "genebench/text.hpp"

namespace genebench {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kGeneDescription: return "gene_description";
    case Task::kProteinClassification: return "protein_classification";
    case Task::kMarkerGene: return "marker_gene";
  }
  return "";
}

std::string_view to_string(Source source) {
  return source == Source::kReal ? "real" : "synthetic";
}

std::string_view to_string(Biotype biotype) {
  switch (biotype) {
    case Biotype::kProteinCoding: return "protein_coding";
    case Biotype::kNonCoding: return "non_coding";
    case Biotype::kPseudogene: return "pseudogene";
  }
  return "";
}

Task parse_task(std::string_view name) {
  for (Task t : {Task::kGeneDescription, Task::kProteinClassification, Task::kMarkerGene}) {
    if (name == to_string(t)) return t;
  }
  fail(ErrorKind::kParse, "unknown task '" + std::string(name) + "'");
}

Source parse_source(std::string_view name) {
  if (name == "real") return Source::kReal;
  if (name == "synthetic") return Source::kSynthetic;
  fail(ErrorKind::kParse, "unknown source '" + std::string(name) + "'");
}

Biotype parse_biotype(std::string_view name) {
  for (Biotype b : {Biotype::kProteinCoding, Biotype::kNonCoding, Biotype::kPseudogene}) {
    if (name == to_string(b)) return b;
  }
  fail(ErrorKind::kParse, "unknown biotype '" + std::string(name) + "'");
}

bool is_image_task(Task task) {
  return task == Task::kProteinClassification || task == Task::kMarkerGene;
}

void GeneRecord::normalize_aliases() {
  std::vector<std::string> kept;
  std::set<std::string> seen;
  for (auto& alias : aliases) {
    std::string a(text::trim(alias));
    if (a.empty() || a == symbol || !seen.insert(a).second) continue;
    kept.push_back(std::move(a));
  }
  aliases = std::move(kept);
}

void GeneRecord::validate() const {
  if (symbol.empty()) fail(ErrorKind::kParse, "gene record has an empty symbol");
  if (std::any_of(symbol.begin(), symbol.end(), text::is_ascii_space)) {
    fail(ErrorKind::kParse, "gene symbol '" + symbol + "' contains whitespace");
  }
  if (std::find(aliases.begin(), aliases.end(), symbol) != aliases.end()) {
    fail(ErrorKind::kParse, "aliases of " + symbol + " contain the symbol itself");
  }
}

void MarkerRelation::validate() const {
  if (gene.empty() || cell_type.empty()) {
    fail(ErrorKind::kParse, "marker relation needs a gene and a cell type");
  }
}

}  // namespace genebench
