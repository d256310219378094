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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "genebench/embed_eval.hpp"
#include "genebench/error.hpp"

namespace genebench::embed {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary embedding I/O assumes a little-endian host");

template <class T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) fail(ErrorKind::kParse, "embedding file: truncated binary data");
  return value;
}

template <class T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

constexpr char kMagic[4] = {'G', 'B', 'E', 'M'};

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t dims,
                                 std::vector<double> values)
    : row_ids_(std::move(row_ids)), dims_(dims), values_(std::move(values)) {
  if (dims_ == 0) fail(ErrorKind::kParse, "embedding matrix needs at least one dimension");
  if (values_.size() != row_ids_.size() * dims_) {
    fail(ErrorKind::kParse, "embedding matrix: value count does not match n*d");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    fail(ErrorKind::kParse, "embedding matrix contains non-finite values");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : row_ids_) {
    if (!seen.insert(id).second) fail(ErrorKind::kParse, "embedding matrix: duplicate row id " + id);
  }
}

EmbeddingMatrix EmbeddingMatrix::read_text(std::istream& in) {
  std::size_t n = 0;
  std::size_t d = 0;
  if (!(in >> n >> d)) fail(ErrorKind::kParse, "embedding file: missing 'n d' header");
  std::vector<std::string> ids;
  std::vector<double> values;
  ids.reserve(n);
  values.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::string id;
    if (!(in >> id)) fail(ErrorKind::kParse, "embedding file: expected " + std::to_string(n) + " rows");
    ids.push_back(id);
    for (std::size_t j = 0; j < d; ++j) {
      std::string tok;
      if (!(in >> tok)) fail(ErrorKind::kParse, "embedding file: short row for " + id);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) fail(ErrorKind::kParse, "embedding file: bad value '" + tok + "'");
      values.push_back(v);
    }
  }
  std::string extra;
  if (in >> extra) fail(ErrorKind::kParse, "embedding file: trailing data after last row");
  return EmbeddingMatrix(std::move(ids), d, std::move(values));
}

EmbeddingMatrix EmbeddingMatrix::read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(ErrorKind::kParse, "embedding file: bad magic");
  if (read_pod<std::uint32_t>(in) != 1) fail(ErrorKind::kParse, "embedding file: unsupported version");
  const auto n = read_pod<std::uint32_t>(in);
  const auto d = read_pod<std::uint32_t>(in);
  std::vector<std::string> ids(n);
  for (auto& id : ids) {
    const auto len = read_pod<std::uint16_t>(in);
    id.resize(len);
    in.read(id.data(), len);
    if (!in) fail(ErrorKind::kParse, "embedding file: truncated symbol");
  }
  std::vector<double> values(static_cast<std::size_t>(n) * d);
  for (auto& v : values) v = read_pod<float>(in);
  return EmbeddingMatrix(std::move(ids), d, std::move(values));
}

EmbeddingMatrix EmbeddingMatrix::load(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail(ErrorKind::kIo, "cannot open embedding file " + path);
  return binary ? read_binary(in) : read_text(in);
}

void EmbeddingMatrix::write_text(std::ostream& out) const {
  out << rows() << ' ' << dims_ << '\n';
  std::ostringstream line;
  line.precision(17);
  for (std::size_t i = 0; i < rows(); ++i) {
    line.str("");
    line << row_ids_[i];
    for (double v : row(i)) line << ' ' << v;
    out << line.str() << '\n';
  }
}

void EmbeddingMatrix::write_binary(std::ostream& out) const {
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, 1);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(rows()));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dims_));
  for (const auto& id : row_ids_) {
    write_pod<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  for (double v : values_) write_pod<float>(out, static_cast<float>(v));
}

void WeightedGraph::add_edge(std::size_t u, std::size_t v, double weight) {
  if (u >= node_count() || v >= node_count()) fail(ErrorKind::kOutOfRange, "edge endpoint out of range");
  if (u == v) fail(ErrorKind::kOutOfRange, "self-loops are not allowed");
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    fail(ErrorKind::kOutOfRange, "edge weight must be positive and finite");
  }
  if (has_edge(u, v)) fail(ErrorKind::kOutOfRange, "duplicate edge");
  adjacency_[u].push_back({v, weight});
  adjacency_[v].push_back({u, weight});
  edges_.push_back({std::min(u, v), std::max(u, v), weight});
  total_weight_ += weight;
}

bool WeightedGraph::has_edge(std::size_t u, std::size_t v) const {
  const auto& a = adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
  const std::size_t other = adjacency_[u].size() <= adjacency_[v].size() ? v : u;
  return std::any_of(a.begin(), a.end(), [&](const Neighbor& nb) { return nb.node == other; });
}

double WeightedGraph::strength(std::size_t u) const {
  double s = 0.0;
  for (const auto& nb : adjacency_[u]) s += nb.weight;
  return s;
}

WeightedGraph knn_graph(const EmbeddingMatrix& emb, std::size_t k, Metric metric,
                        unsigned threads) {
  const std::size_t n = emb.rows();
  if (k < 1 || k >= n) {
    fail(ErrorKind::kKTooLarge, "knn: need 1 <= k < n (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
  }
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : emb.row(i)) s += v * v;
    norms[i] = std::sqrt(s);
    if (metric == Metric::kCosine && norms[i] == 0.0) {
      fail(ErrorKind::kDegenerateRow, "knn: zero vector for " + emb.row_ids()[i] + " under cosine");
    }
  }

  struct Scored {
    double score;  // higher is nearer
    std::size_t j;
  };
  std::vector<std::vector<Scored>> nearest(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<Scored> scored;
    for (std::size_t i = begin; i < end; ++i) {
      scored.clear();
      const auto a = emb.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const auto b = emb.row(j);
        double s = 0.0;
        if (metric == Metric::kCosine) {
          for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * b[t];
          s /= norms[i] * norms[j];
        } else {
          for (std::size_t t = 0; t < a.size(); ++t) s -= (a[t] - b[t]) * (a[t] - b[t]);
        }
        scored.push_back({s, j});
      }
      auto better = [](const Scored& x, const Scored& y) {
        return x.score > y.score || (x.score == y.score && x.j < y.j);
      };
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                        scored.end(), better);
      nearest[i].assign(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k));
    }
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(work, b, std::min(n, b + chunk));
  for (auto& t : pool) t.join();

  WeightedGraph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& s : nearest[i]) {
      if (g.has_edge(i, s.j)) continue;
      const double w = metric == Metric::kCosine ? std::max(s.score, kMinCosineWeight) : 1.0;
      g.add_edge(i, s.j, w);
    }
  }
  return g;
}

}  // namespace genebench::embed
