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

#ifndef GENEBENCH_EMBED_EVAL_HPP_
#define GENEBENCH_EMBED_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Embedding-quality analysis: k-NN graphs over gene embeddings, Leiden
// communities, NMI against functional labels and over-representation
// analysis of gene sets within clusters.
namespace genebench::embed {

// Dense row-major matrix of per-gene vectors.
//
// Text format: a header line "n d", then n lines "symbol v1 ... vd".
// Binary format (little-endian): magic "GBEM", u32 version (1), u32 n, u32 d,
// then n symbols as (u16 byte length, bytes), then n*d float32 values in
// row-major order.
class EmbeddingMatrix {
 public:
  // Throws kParse on non-finite values, duplicate ids or a size mismatch.
  EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t dims,
                  std::vector<double> values);

  static EmbeddingMatrix read_text(std::istream& in);
  static EmbeddingMatrix read_binary(std::istream& in);
  static EmbeddingMatrix load(const std::string& path, bool binary);
  void write_text(std::ostream& out) const;
  void write_binary(std::ostream& out) const;

  std::size_t rows() const { return row_ids_.size(); }
  std::size_t dims() const { return dims_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dims_, dims_};
  }
  const std::vector<std::string>& row_ids() const { return row_ids_; }

 private:
  std::vector<std::string> row_ids_;
  std::size_t dims_;
  std::vector<double> values_;
};

struct Neighbor {
  std::size_t node;
  double weight;
};

struct Edge {
  std::size_t u;
  std::size_t v;
  double weight;
};

// Undirected, no self-loops, at most one edge per pair, positive finite
// weights.
class WeightedGraph {
 public:
  explicit WeightedGraph(std::size_t n) : adjacency_(n) {}

  // Throws kOutOfRange for self-loops, duplicates, bad nodes or weights.
  void add_edge(std::size_t u, std::size_t v, double weight);
  bool has_edge(std::size_t u, std::size_t v) const;

  std::size_t node_count() const { return adjacency_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t u) const { return adjacency_[u]; }
  double strength(std::size_t u) const;
  double total_weight() const { return total_weight_; }

 private:
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<Edge> edges_;
  double total_weight_ = 0.0;
};

enum class Metric { kCosine, kEuclidean };

inline constexpr double kMinCosineWeight = 1e-6;

// Each row linked to its k nearest rows (ties to the lower index), mutual
// pairs merged. Weight 1 under euclidean, max(cosine similarity,
// kMinCosineWeight) under cosine. Throws kKTooLarge unless 1 <= k < n, and
// kDegenerateRow for a zero row under cosine. threads = 0 picks the hardware
// concurrency; the result does not depend on it.
WeightedGraph knn_graph(const EmbeddingMatrix& emb, std::size_t k, Metric metric,
                        unsigned threads = 0);

// Community assignment with ids 0..k-1, every id used.
class Partition {
 public:
  // Throws kOutOfRange unless ids are exactly 0..k-1.
  explicit Partition(std::vector<std::size_t> assignment);

  // Relabels arbitrary ids by order of first appearance.
  static Partition canonical(std::span<const std::size_t> labels);

  std::size_t size() const { return assignment_.size(); }
  std::size_t community_count() const { return count_; }
  std::size_t operator[](std::size_t node) const { return assignment_[node]; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  std::vector<std::vector<std::size_t>> members() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<std::size_t> assignment_;
  std::size_t count_ = 0;
};

// Q = sum_c [ w_in(c)/W - resolution * (deg(c) / 2W)^2 ]; 0 when W = 0.
double modularity(const WeightedGraph& g, const Partition& p, double resolution = 1.0);

struct LeidenOptions {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  int max_iters = 10;  // full passes; stops early once a pass moves nothing
  double theta = 0.01;  // refinement randomness
  // Independent runs with seeds derived from `seed`; the highest-modularity
  // partition is kept (earliest run on ties). A single run can settle in a
  // local optimum even on tiny graphs such as an 8-cycle.
  int restarts = 10;
};

struct LeidenResult {
  Partition partition{std::vector<std::size_t>{}};
  // Modularity after every local-moving phase, in order, across all levels
  // and passes. Never decreases.
  std::vector<double> level_quality;
  int passes = 0;
  std::uint64_t seed = 0;
  int restart = 0;  // which run produced the partition
};

// Local moving, refinement and aggregation, repeated. Deterministic for a
// fixed seed. level_quality belongs to the winning run. Throws kOutOfRange on
// an empty graph or bad options.
LeidenResult leiden(const WeightedGraph& g, const LeidenOptions& options = {});

// True iff every community induces a connected subgraph.
bool communities_connected(const WeightedGraph& g, const Partition& p);

// Labels file: "symbol<TAB>label" per line; '#' lines and blank lines are
// skipped. Throws kParse on a malformed line or a repeated symbol.
std::vector<std::pair<std::string, std::string>> read_labels(const std::string& path);

// Maps labels to dense ids by first appearance.
std::vector<std::size_t> encode_labels(std::span<const std::string> labels);

// Mutual information over the arithmetic mean of the two entropies. Two
// constant labelings give 1, exactly one constant labeling gives 0. Terms are
// summed in sorted order, so the value is exactly invariant under relabeling
// and argument swap. Throws kLengthMismatch (also for empty input).
double nmi(std::span<const std::size_t> a, std::span<const std::size_t> b);

// P(X >= observed) for X ~ Hypergeometric(population, successes, draws),
// summed in log space.
double hypergeometric_upper_tail(std::size_t population, std::size_t successes,
                                 std::size_t draws, std::size_t observed);

// Over-representation p-value of gene_set within cluster_genes. Throws
// kNotSubset if either set has genes outside the universe.
double ora_enrichment(const std::set<std::string>& cluster_genes,
                      const std::set<std::string>& gene_set,
                      const std::set<std::string>& universe);

// p * m clamped at 1. Throws kOutOfRange for inputs outside [0, 1].
std::vector<double> bonferroni(std::span<const double> pvals);

struct PathwayResult {
  std::string pathway;
  std::size_t overlap = 0;
  double p_value = 1.0;
  double adjusted_p = 1.0;
};

// Ascending adjusted p (descending -log p), ties by pathway name; at most n.
std::vector<PathwayResult> top_pathways(std::vector<PathwayResult> results, std::size_t n);

// Gene sets file: first line "universe<TAB>comma-joined symbols", then
// "pathway<TAB>comma-joined symbols" per line.
struct GeneSetCollection {
  std::set<std::string> universe;
  std::vector<std::pair<std::string, std::set<std::string>>> sets;

  static GeneSetCollection parse(std::string_view body);
  static GeneSetCollection load(const std::string& path);
};

// ORA of every set against one cluster (restricted to the universe), with
// Bonferroni over the sets, in collection order.
std::vector<PathwayResult> enrich_cluster(const std::set<std::string>& cluster_genes,
                                          const GeneSetCollection& collection);

}  // namespace genebench::embed

#endif  // GENEBENCH_EMBED_EVAL_HPP_
