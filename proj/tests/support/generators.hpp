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

#ifndef GENEBENCH_TESTS_SUPPORT_GENERATORS_HPP_
#define GENEBENCH_TESTS_SUPPORT_GENERATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genebench/embed_eval.hpp"
#include "genebench/postprocess.hpp"
#include "genebench/random.hpp"
#include "genebench/types.hpp"

// Hand-rolled generators for the property tests. Everything is driven by an
// explicit seed so a failing case can be replayed from its printed seed.
namespace genebench::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  // Inclusive on both ends.
  std::size_t size(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng_.uniform_index(hi - lo + 1));
  }
  bool coin(double p = 0.5) { return rng_.uniform01() < p; }
  double real(double lo, double hi) { return lo + (hi - lo) * rng_.uniform01(); }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(rng_.uniform_index(v.size()))];
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    rng_.shuffle(v);
  }

  // Characters drawn from `alphabet`, length in [lo, hi].
  std::string string(std::size_t lo, std::size_t hi, std::string_view alphabet);

  // Tokens "w0".."w{vocab-1}", length in [lo, hi]. Small vocabularies make
  // repeated n-grams common.
  std::vector<std::string> tokens(std::size_t lo, std::size_t hi, std::size_t vocab);

  std::vector<std::size_t> labels(std::size_t n, std::size_t classes);

  // Erdos-Renyi with edge probability p; weights in [0.5, 3] when weighted.
  embed::WeightedGraph random_graph(std::size_t n, double p, bool weighted);

  // Random spanning tree plus each remaining pair with probability p.
  embed::WeightedGraph connected_graph(std::size_t n, double p, bool weighted);

  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

struct NamedGraph {
  std::string name;
  embed::WeightedGraph graph;
};

// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
embed::WeightedGraph two_triangles();

// Hand-built graphs with at most 8 nodes plus seeded random connected ones.
std::vector<NamedGraph> small_graph_suite();

// Catalog of `count` synthetic genes SYN0001.. with biotypes cycling through
// protein_coding, protein_coding, non_coding, pseudogene. Every gene has a
// summary, a valid Ensembl and HGNC ID and two aliases.
std::vector<GeneRecord> synthetic_catalog(std::size_t count);

postprocess::GeneIdDatabase id_database(const std::vector<GeneRecord>& records);

struct RepairCase {
  std::string gene;
  std::string text;
  std::string kind;  // which defects were planted
};

// Outputs with wrong, malformed, missing or duplicated IDs and redundant
// alias passages, one gene per case.
std::vector<RepairCase> repair_cases(const std::vector<GeneRecord>& records, std::size_t count,
                                     std::uint64_t seed);

}  // namespace genebench::testing

#endif  // GENEBENCH_TESTS_SUPPORT_GENERATORS_HPP_
