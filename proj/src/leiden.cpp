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
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "genebench/embed_eval.hpp"
#include "genebench/error.hpp"
#include "genebench/random.hpp"

namespace genebench::embed {

Partition::Partition(std::vector<std::size_t> assignment) : assignment_(std::move(assignment)) {
  std::vector<bool> used;
  for (std::size_t c : assignment_) {
    if (c >= used.size()) used.resize(c + 1, false);
    used[c] = true;
  }
  if (!std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
    fail(ErrorKind::kOutOfRange, "partition ids must be exactly 0..k-1");
  }
  count_ = used.size();
}

Partition Partition::canonical(std::span<const std::size_t> labels) {
  std::vector<std::size_t> remap;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::size_t next = 0;
  for (std::size_t label : labels) {
    if (label >= remap.size()) remap.resize(label + 1, kUnset);
    if (remap[label] == kUnset) remap[label] = next++;
    out.push_back(remap[label]);
  }
  return Partition(std::move(out));
}

std::vector<std::vector<std::size_t>> Partition::members() const {
  std::vector<std::vector<std::size_t>> out(count_);
  for (std::size_t i = 0; i < assignment_.size(); ++i) out[assignment_[i]].push_back(i);
  return out;
}

double modularity(const WeightedGraph& g, const Partition& p, double resolution) {
  if (p.size() != g.node_count()) fail(ErrorKind::kLengthMismatch, "partition size != node count");
  const double w = g.total_weight();
  if (w == 0.0) return 0.0;
  const Partition c = Partition::canonical(p.assignment());
  std::vector<double> inside(c.community_count(), 0.0);
  std::vector<double> degree(c.community_count(), 0.0);
  for (const auto& e : g.edges()) {
    degree[c[e.u]] += e.weight;
    degree[c[e.v]] += e.weight;
    if (c[e.u] == c[e.v]) inside[c[e.u]] += e.weight;
  }
  double q = 0.0;
  for (std::size_t k = 0; k < inside.size(); ++k) {
    const double frac = degree[k] / (2.0 * w);
    q += inside[k] / w - resolution * frac * frac;
  }
  return q;
}

namespace {

// One level of the aggregation hierarchy. Node i stands for a set of
// original nodes; self_weight holds the edge weight inside that set and
// strength the summed original strengths.
struct Level {
  std::vector<std::vector<Neighbor>> adj;
  std::vector<double> self_weight;
  std::vector<double> strength;

  std::size_t size() const { return adj.size(); }
};

Level base_level(const WeightedGraph& g) {
  Level l;
  l.adj.resize(g.node_count());
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    auto nb = g.neighbors(u);
    l.adj[u].assign(nb.begin(), nb.end());
  }
  l.self_weight.assign(g.node_count(), 0.0);
  l.strength.resize(g.node_count());
  for (std::size_t u = 0; u < g.node_count(); ++u) l.strength[u] = g.strength(u);
  return l;
}

// Dense community ids in first-appearance order; returns the count.
std::size_t compact(std::vector<std::size_t>& labels) {
  const Partition p = Partition::canonical(labels);
  labels = p.assignment();
  return p.community_count();
}

class Optimizer {
 public:
  Optimizer(double total_weight, const LeidenOptions& opts, Rng& rng)
      : two_w_(2.0 * total_weight),
        gamma_(opts.resolution),
        theta_(opts.theta),
        eps_(1e-12 * (1.0 + total_weight)),
        rng_(rng) {}

  // Queue-based local moving. Returns true if any node changed community.
  bool move_nodes(const Level& l, std::vector<std::size_t>& comm) {
    const std::size_t n = l.size();
    std::vector<double> total(n, 0.0);
    std::vector<std::size_t> size(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      total[comm[i]] += l.strength[i];
      ++size[comm[i]];
    }
    std::vector<std::size_t> empty;
    for (std::size_t c = n; c-- > 0;) {
      if (size[c] == 0) empty.push_back(c);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng_.shuffle(order);
    std::deque<std::size_t> queue(order.begin(), order.end());
    std::vector<bool> queued(n, true);
    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool changed = false;

    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      queued[i] = false;
      const std::size_t from = comm[i];
      const double ki = l.strength[i];

      touched.clear();
      touched.push_back(from);
      link[from] = 0.0;
      for (const auto& nb : l.adj[i]) {
        const std::size_t c = comm[nb.node];
        if (c != from && link[c] == 0.0) touched.push_back(c);
        link[c] += nb.weight;
      }

      total[from] -= ki;
      --size[from];
      std::size_t best = from;
      double best_gain = link[from] - gamma_ * ki * total[from] / two_w_;
      for (std::size_t c : touched) {
        if (c == from) continue;
        const double gain = link[c] - gamma_ * ki * total[c] / two_w_;
        if (gain > best_gain + eps_) {
          best = c;
          best_gain = gain;
        }
      }
      bool to_empty = false;
      if (size[from] > 0 && 0.0 > best_gain + eps_ && !empty.empty()) {
        best = empty.back();
        to_empty = true;
      }
      for (std::size_t c : touched) link[c] = 0.0;

      if (to_empty) empty.pop_back();
      total[best] += ki;
      ++size[best];
      comm[i] = best;
      if (size[from] == 0) empty.push_back(from);
      if (best != from) {
        changed = true;
        for (const auto& nb : l.adj[i]) {
          if (comm[nb.node] != best && !queued[nb.node]) {
            queued[nb.node] = true;
            queue.push_back(nb.node);
          }
        }
      }
    }
    return changed;
  }

  // Refines each community of `comm` by merging well-connected singletons
  // into well-connected sub-communities, chosen randomly with weight
  // exp(gain / theta) among non-negative gains.
  std::vector<std::size_t> refine(const Level& l, const std::vector<std::size_t>& comm) {
    const std::size_t n = l.size();
    std::vector<double> comm_total(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) comm_total[comm[i]] += l.strength[i];

    std::vector<std::size_t> ref(n);
    std::iota(ref.begin(), ref.end(), std::size_t{0});
    std::vector<double> ref_total = l.strength;
    std::vector<std::size_t> ref_size(n, 1);
    // Weight from each refined community to the rest of its parent.
    std::vector<double> ref_out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& nb : l.adj[i]) {
        if (comm[nb.node] == comm[i]) ref_out[i] += nb.weight;
      }
    }
    const std::vector<double> node_out = ref_out;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng_.shuffle(order);
    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    std::vector<double> weights;

    for (std::size_t v : order) {
      if (ref_size[ref[v]] != 1) continue;
      const std::size_t parent = comm[v];
      const double kv = l.strength[v];
      if (node_out[v] < gamma_ * kv * (comm_total[parent] - kv) / two_w_) continue;

      touched.clear();
      for (const auto& nb : l.adj[v]) {
        if (comm[nb.node] != parent) continue;
        const std::size_t t = ref[nb.node];
        if (link[t] == 0.0) touched.push_back(t);
        link[t] += nb.weight;
      }

      // Candidate 0 is staying alone (gain 0).
      std::vector<std::size_t> cand{ref[v]};
      std::vector<double> gains{0.0};
      for (std::size_t t : touched) {
        const double kt = ref_total[t];
        if (ref_out[t] < gamma_ * kt * (comm_total[parent] - kt) / two_w_) continue;
        const double gain = link[t] - gamma_ * kv * kt / two_w_;
        if (gain >= 0.0) {
          cand.push_back(t);
          gains.push_back(gain);
        }
      }
      const double top = *std::max_element(gains.begin(), gains.end());
      weights.clear();
      double sum = 0.0;
      for (double gain : gains) {
        weights.push_back(std::exp((gain - top) / theta_));
        sum += weights.back();
      }
      double pick = rng_.uniform01() * sum;
      std::size_t chosen = cand.size() - 1;
      for (std::size_t k = 0; k < cand.size(); ++k) {
        if (pick < weights[k]) {
          chosen = k;
          break;
        }
        pick -= weights[k];
      }
      const std::size_t t = cand[chosen];
      if (t != ref[v]) {
        const std::size_t old = ref[v];
        ref_size[old] = 0;
        ref_total[old] = 0.0;
        ref[v] = t;
        ++ref_size[t];
        ref_out[t] += node_out[v] - 2.0 * link[t];
        ref_total[t] += kv;
      }
      for (std::size_t u : touched) link[u] = 0.0;
    }
    return ref;
  }

 private:
  double two_w_;
  double gamma_;
  double theta_;
  double eps_;
  Rng& rng_;
};

Level aggregate(const Level& l, const std::vector<std::size_t>& groups, std::size_t count) {
  Level out;
  out.adj.resize(count);
  out.self_weight.assign(count, 0.0);
  out.strength.assign(count, 0.0);
  std::vector<double> acc(count, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t i = 0; i < l.size(); ++i) members[groups[i]].push_back(i);
  for (std::size_t c = 0; c < count; ++c) {
    touched.clear();
    for (std::size_t i : members[c]) {
      out.self_weight[c] += l.self_weight[i];
      out.strength[c] += l.strength[i];
      for (const auto& nb : l.adj[i]) {
        const std::size_t d = groups[nb.node];
        if (d == c) {
          // Each internal edge is seen from both ends.
          out.self_weight[c] += 0.5 * nb.weight;
          continue;
        }
        if (acc[d] == 0.0) touched.push_back(d);
        acc[d] += nb.weight;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t d : touched) {
      out.adj[c].push_back({d, acc[d]});
      acc[d] = 0.0;
    }
  }
  return out;
}

// Splits communities that are not connected in g into their components.
std::vector<std::size_t> split_disconnected(const WeightedGraph& g,
                                            const std::vector<std::size_t>& labels) {
  const std::size_t n = g.node_count();
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> out(n, kUnset);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (out[s] != kUnset) continue;
    out[s] = next;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(u)) {
        if (out[nb.node] == kUnset && labels[nb.node] == labels[s]) {
          out[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return out;
}

}  // namespace

namespace {

LeidenResult leiden_run(const WeightedGraph& g, const LeidenOptions& options, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  LeidenResult result;
  result.seed = options.seed;
  std::vector<std::size_t> flat(n);
  std::iota(flat.begin(), flat.end(), std::size_t{0});
  if (g.total_weight() == 0.0) {
    result.partition = Partition(flat);
    result.level_quality.push_back(0.0);
    return result;
  }

  Rng rng(seed);
  Optimizer opt(g.total_weight(), options, rng);
  const Level base = base_level(g);

  auto record = [&](const std::vector<std::size_t>& labels) {
    const double q = modularity(g, Partition::canonical(labels), options.resolution);
    if (!result.level_quality.empty() && q < result.level_quality.back() - 1e-12) {
      throw std::logic_error("leiden: quality decreased between levels");
    }
    result.level_quality.push_back(q);
  };

  for (int pass = 0; pass < options.max_iters; ++pass) {
    ++result.passes;
    bool changed = false;
    Level level = base;
    std::vector<std::size_t> map(n);  // original node -> level node
    std::iota(map.begin(), map.end(), std::size_t{0});
    std::vector<std::size_t> comm = flat;
    compact(comm);

    while (true) {
      changed = opt.move_nodes(level, comm) || changed;
      const std::size_t count = compact(comm);
      for (std::size_t i = 0; i < n; ++i) flat[i] = comm[map[i]];
      record(flat);
      if (count == level.size()) break;

      std::vector<std::size_t> ref = opt.refine(level, comm);
      std::size_t ref_count = compact(ref);
      std::vector<std::size_t> next_comm;
      if (ref_count == level.size()) {
        // Refinement merged nothing; fall back to the unrefined partition.
        ref = comm;
        ref_count = count;
        next_comm.resize(count);
        std::iota(next_comm.begin(), next_comm.end(), std::size_t{0});
      } else {
        next_comm.assign(ref_count, 0);
        for (std::size_t i = 0; i < level.size(); ++i) next_comm[ref[i]] = comm[i];
      }
      level = aggregate(level, ref, ref_count);
      for (std::size_t i = 0; i < n; ++i) map[i] = ref[map[i]];
      comm = std::move(next_comm);
    }
    if (!changed) break;
  }

  result.partition = Partition::canonical(split_disconnected(g, flat));
  return result;
}

}  // namespace

LeidenResult leiden(const WeightedGraph& g, const LeidenOptions& options) {
  if (g.node_count() == 0) fail(ErrorKind::kOutOfRange, "leiden: empty graph");
  if (options.max_iters < 1) fail(ErrorKind::kOutOfRange, "leiden: max_iters must be >= 1");
  if (!(options.theta > 0.0)) fail(ErrorKind::kOutOfRange, "leiden: theta must be positive");
  if (options.restarts < 1) fail(ErrorKind::kOutOfRange, "leiden: restarts must be >= 1");

  // Run r uses the r-th draw of a generator seeded with options.seed, except
  // run 0, which uses options.seed itself.
  Rng seeds(options.seed);
  LeidenResult best;
  double best_q = 0.0;
  for (int r = 0; r < options.restarts; ++r) {
    const std::uint64_t seed = r == 0 ? options.seed : seeds.next();
    LeidenResult run = leiden_run(g, options, seed);
    const double q = modularity(g, run.partition, options.resolution);
    if (r == 0 || q > best_q + 1e-12) {
      run.restart = r;
      best = std::move(run);
      best_q = q;
    }
  }
  return best;
}

bool communities_connected(const WeightedGraph& g, const Partition& p) {
  if (p.size() != g.node_count()) fail(ErrorKind::kLengthMismatch, "partition size != node count");
  const auto split = split_disconnected(g, p.assignment());
  return Partition::canonical(split).community_count() == p.community_count();
}

}  // namespace genebench::embed
