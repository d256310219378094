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

#ifndef GENEBENCH_TYPES_HPP_
#define GENEBENCH_TYPES_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace genebench {

enum class Task { kGeneDescription, kProteinClassification, kMarkerGene };
enum class Source { kReal, kSynthetic };
enum class Biotype { kProteinCoding, kNonCoding, kPseudogene };

std::string_view to_string(Task task);
std::string_view to_string(Source source);
std::string_view to_string(Biotype biotype);

// Wire names: gene_description / protein_classification / marker_gene,
// real / synthetic, protein_coding / non_coding / pseudogene. Unknown names
// throw kParse.
Task parse_task(std::string_view name);
Source parse_source(std::string_view name);
Biotype parse_biotype(std::string_view name);

// True for the two image tasks.
bool is_image_task(Task task);

struct GeneRecord {
  std::string symbol;
  std::string full_name;
  std::vector<std::string> aliases;
  std::string ensembl_id;
  std::string hgnc_id;
  Biotype biotype = Biotype::kProteinCoding;
  std::string summary;

  // Drops empty and duplicate aliases and any alias equal to the symbol.
  void normalize_aliases();
  // Throws kParse if the symbol is empty or contains whitespace, or if the
  // aliases still contain the symbol.
  void validate() const;

  bool operator==(const GeneRecord&) const = default;
};

struct MarkerRelation {
  std::string gene;
  std::string cell_type;
  bool is_marker = false;

  void validate() const;
  bool operator==(const MarkerRelation&) const = default;
};

}  // namespace genebench

#endif  // GENEBENCH_TYPES_HPP_
