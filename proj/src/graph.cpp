#include "contagion/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "contagion/error.hpp"
#include "contagion/rng.hpp"

namespace contagion {

const char* to_string(Segment s) noexcept {
  switch (s) {
    case Segment::Core: return "core";
    case Segment::Intermediate: return "intermediate";
    case Segment::Periphery: return "periphery";
  }
  return "?";
}

Segment segment_from_string(const std::string& s) {
  if (s == "core") return Segment::Core;
  if (s == "intermediate") return Segment::Intermediate;
  if (s == "periphery") return Segment::Periphery;
  throw ParamError("segment", "unknown segment '" + s + "'");
}

RawGraph::RawGraph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges)
    : adjacency_(n) {
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw ParamError("edges", "node id out of range");
    if (a == b) throw ParamError("edges", "self-loop on node " + std::to_string(a));
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto& adj = adjacency_[v];
    std::sort(adj.begin(), adj.end());
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end()) {
      throw ParamError("edges", "duplicate edge at node " + std::to_string(v));
    }
  }
}

bool RawGraph::has_edge(NodeId a, NodeId b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

double calibrated_weight(std::span<const double> xi, std::span<const double> xj) noexcept {
  double dot = 0.0;
  for (std::size_t d = 0; d < xi.size(); ++d) dot += xi[d] * xj[d];
  return std::clamp((1.0 + dot) / 2.0, 0.0, 1.0);
}

WeightedGraph::WeightedGraph(RawGraph raw, FeatureMatrix features, std::vector<double> csr_weights)
    : raw_(std::move(raw)), features_(std::move(features)), weights_(std::move(csr_weights)) {
  const std::size_t n = raw_.node_count();
  if (features_.rows != n) {
    throw ParamError("features", "expected " + std::to_string(n) + " rows, got " +
                                     std::to_string(features_.rows));
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + raw_.degree(NodeId(v));
  if (weights_.size() != offsets_[n]) throw ParamError("weights", "CSR size mismatch");

  weighted_degree_.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double d = 0.0;
    for (std::size_t e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      if (!(weights_[e] >= 0.0 && weights_[e] <= 1.0)) {
        throw ParamError("weights", "edge weight outside [0,1]");
      }
      d += weights_[e];
    }
    weighted_degree_[v] = d;
  }
  for (auto [a, b] : raw_.edges()) {
    if (weight(a, b) != weight(b, a)) throw ParamError("weights", "asymmetric edge weights");
  }
  segments_ = segment_nodes(raw_);
}

double WeightedGraph::weight(NodeId a, NodeId b) const {
  auto nb = raw_.neighbors(a);
  auto it = std::lower_bound(nb.begin(), nb.end(), b);
  if (it == nb.end() || *it != b) return 0.0;
  return weights_[offsets_[a] + std::size_t(it - nb.begin())];
}

std::vector<NodeId> WeightedGraph::nodes_in(Segment s) const {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < segments_.size(); ++v) {
    if (segments_[v] == s) out.push_back(NodeId(v));
  }
  return out;
}

RawGraph generate_pa(std::size_t n, std::size_t r, std::uint64_t seed) {
  if (r < 1) throw ParamError("attach", "must be at least 1");
  if (n <= r) throw ParamError("nodes", "must exceed attach (n > r)");

  Rng rng(derive_seed(seed, "netgen.pa"));
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(r * (r + 1) / 2 + r * (n - r - 1));
  // Each node appears once per incident edge end, so a uniform pick from
  // `ends` is a degree-proportional pick.
  std::vector<NodeId> ends;
  ends.reserve(2 * edges.capacity());
  for (NodeId i = 0; i <= r; ++i) {
    for (NodeId j = 0; j < i; ++j) {
      edges.emplace_back(j, i);
      ends.push_back(i);
      ends.push_back(j);
    }
  }

  std::vector<NodeId> targets;
  for (std::size_t v = r + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < r) {
      std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
      NodeId t = ends[pick(rng)];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.emplace_back(t, NodeId(v));
      ends.push_back(t);
      ends.push_back(NodeId(v));
    }
  }
  return RawGraph(n, std::move(edges));
}

WeightedGraph assign_edge_weights(RawGraph g, FeatureMatrix f) {
  if (f.rows != g.node_count()) {
    throw ParamError("features", "row count does not match node count");
  }
  std::vector<double> w;
  w.reserve(2 * g.edge_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    for (NodeId u : g.neighbors(NodeId(v))) {
      // Evaluate with the smaller id first so both CSR slots get the same bits.
      auto lo = std::min<std::size_t>(v, u), hi = std::max<std::size_t>(v, u);
      w.push_back(calibrated_weight(f.row(lo), f.row(hi)));
    }
  }
  return WeightedGraph(std::move(g), std::move(f), std::move(w));
}

std::vector<Segment> segment_nodes(const RawGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
  const auto decile = static_cast<std::size_t>(std::ceil(0.1 * double(n) - 1e-9));
  std::vector<Segment> seg(n, Segment::Intermediate);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < decile) {
      seg[order[i]] = Segment::Core;
    } else if (i >= n - std::min(decile, n)) {
      seg[order[i]] = Segment::Periphery;
    }
  }
  return seg;
}

std::vector<std::size_t> bfs_distances(const RawGraph& g, NodeId source) {
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.node_count(), kInf);
  std::vector<NodeId> queue;
  queue.reserve(g.node_count());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] == kInf) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::size_t connected_components(const RawGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<bool> seen(n, false);
  std::size_t count = 0;
  std::vector<NodeId> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++count;
    seen[s] = true;
    stack.push_back(NodeId(s));
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId w : g.neighbors(u)) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
  }
  return count;
}

namespace {
std::size_t eccentricity(const RawGraph& g, NodeId s) {
  auto dist = bfs_distances(g, s);
  std::size_t ecc = 0;
  for (auto d : dist) {
    if (d == std::numeric_limits<std::size_t>::max()) {
      throw std::domain_error("diameter undefined: graph is disconnected");
    }
    ecc = std::max(ecc, d);
  }
  return ecc;
}
}  // namespace

std::size_t diameter_serial(const RawGraph& g) {
  std::size_t best = 0;
  for (std::size_t s = 0; s < g.node_count(); ++s) best = std::max(best, eccentricity(g, NodeId(s)));
  return best;
}

std::size_t diameter(const RawGraph& g) {
  if (connected_components(g) > 1) {
    throw std::domain_error("diameter undefined: graph is disconnected");
  }
  const auto n = static_cast<std::int64_t>(g.node_count());
  std::size_t best = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (std::int64_t s = 0; s < n; ++s) {
    best = std::max(best, eccentricity(g, NodeId(s)));
  }
  return best;
}

WeightedGraph build_network(std::size_t n, std::size_t r, std::size_t k, std::uint64_t seed) {
  RawGraph g = generate_pa(n, r, seed);
  FeatureMatrix f = spectral_embed(g, k);
  return assign_edge_weights(std::move(g), std::move(f));
}

}  // namespace contagion
