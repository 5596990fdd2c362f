#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace contagion {

using NodeId = std::uint32_t;

enum class Segment : std::uint8_t { Core, Intermediate, Periphery };

const char* to_string(Segment s) noexcept;
Segment segment_from_string(const std::string& s);

// Unweighted undirected simple graph. Node ids are dense in [0, n) and, for
// generated graphs, equal the arrival order.
class RawGraph {
 public:
  RawGraph() = default;
  // Validates: ids in range, no self-loops, no duplicate edges.
  RawGraph(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::pair<NodeId, NodeId>>& edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[v]; }
  std::size_t degree(NodeId v) const { return adjacency_[v].size(); }
  bool has_edge(NodeId a, NodeId b) const;

 private:
  std::vector<std::pair<NodeId, NodeId>> edges_;  // stored with first < second
  std::vector<std::vector<NodeId>> adjacency_;    // sorted ascending
};

// n x k row-major matrix of node features. Rows are unit length once
// produced by spectral_embed.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<double> eigenvalues;  // ascending; empty for hand-built features
  double max_residual = 0.0;        // max ||Lq - lambda q|| over retained pairs
  std::vector<std::string> warnings;

  std::span<const double> row(std::size_t v) const { return {values.data() + v * dim, dim}; }
  std::span<double> row(std::size_t v) { return {values.data() + v * dim, dim}; }
};

// Immutable weighted network shared read-only by all simulation workers.
// Adjacency is CSR aligned with RawGraph::neighbors ordering.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  // weights[e] is the weight of the e-th CSR slot; must be symmetric.
  WeightedGraph(RawGraph raw, FeatureMatrix features, std::vector<double> csr_weights);

  const RawGraph& raw() const noexcept { return raw_; }
  const FeatureMatrix& features() const noexcept { return features_; }
  std::size_t node_count() const noexcept { return raw_.node_count(); }
  std::size_t dim() const noexcept { return features_.dim; }

  std::span<const NodeId> neighbors(NodeId v) const { return raw_.neighbors(v); }
  std::span<const double> neighbor_weights(NodeId v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t slot_begin(NodeId v) const { return offsets_[v]; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<double>& csr_weights() const noexcept { return weights_; }

  // 0 for non-edges.
  double weight(NodeId a, NodeId b) const;
  double weighted_degree(NodeId v) const { return weighted_degree_[v]; }
  const std::vector<double>& weighted_degrees() const noexcept { return weighted_degree_; }

  Segment segment(NodeId v) const { return segments_[v]; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  std::vector<NodeId> nodes_in(Segment s) const;

 private:
  RawGraph raw_;
  FeatureMatrix features_;
  std::vector<std::size_t> offsets_;
  std::vector<double> weights_;
  std::vector<double> weighted_degree_;
  std::vector<Segment> segments_;
};

// Preferential attachment G(n, r): complete seed graph on r+1 nodes, then
// every arrival draws r distinct targets with probability proportional to
// degree (sequentially, without replacement).
RawGraph generate_pa(std::size_t n, std::size_t r, std::uint64_t seed);

// Eigenvectors of L = D - A for the k smallest eigenvalues, each column
// unit-norm, then each row renormalized to unit length.
FeatureMatrix spectral_embed(const RawGraph& g, std::size_t k);

// Calibrated weights A[i,j] = (1 + x_i . x_j) / 2 on existing edges.
WeightedGraph assign_edge_weights(RawGraph g, FeatureMatrix f);

double calibrated_weight(std::span<const double> xi, std::span<const double> xj) noexcept;

// Top ceil(0.1 n) by degree -> core, bottom ceil(0.1 n) -> periphery.
// Degree ties are broken by ascending node id.
std::vector<Segment> segment_nodes(const RawGraph& g);

std::size_t connected_components(const RawGraph& g);

// Exact unweighted diameter (BFS from every node, OpenMP over sources).
// Throws std::domain_error for disconnected graphs.
std::size_t diameter(const RawGraph& g);
// Single-threaded reference for diameter().
std::size_t diameter_serial(const RawGraph& g);

// Hop distances from `source`; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_distances(const RawGraph& g, NodeId source);

// Convenience: PA graph, k-dim spectral features, calibrated weights.
WeightedGraph build_network(std::size_t n, std::size_t r, std::size_t k, std::uint64_t seed);

}  // namespace contagion
