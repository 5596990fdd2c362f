#pragma once

#include <vector>

#include "contagion/graph.hpp"

namespace fixtures {

inline contagion::RawGraph path_graph(std::size_t n) {
  std::vector<std::pair<contagion::NodeId, contagion::NodeId>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({contagion::NodeId(i), contagion::NodeId(i + 1)});
  return contagion::RawGraph(n, e);
}

inline contagion::RawGraph star_graph(std::size_t leaves) {
  std::vector<std::pair<contagion::NodeId, contagion::NodeId>> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.push_back({0, contagion::NodeId(i)});
  return contagion::RawGraph(leaves + 1, e);
}

// Features given row by row; weights follow from them.
inline contagion::WeightedGraph with_features(contagion::RawGraph g, std::size_t dim, std::vector<double> rows) {
  contagion::FeatureMatrix f;
  f.rows = g.node_count();
  f.dim = dim;
  f.values = std::move(rows);
  return contagion::assign_edge_weights(std::move(g), std::move(f));
}

// Every node gets the feature e1, so all weights are 1 and every affinity to e1 is 1.
inline contagion::WeightedGraph uniform_features(contagion::RawGraph g, std::size_t dim = 2) {
  std::vector<double> rows(g.node_count() * dim, 0.0);
  for (std::size_t v = 0; v < g.node_count(); ++v) rows[v * dim] = 1.0;
  return with_features(std::move(g), dim, std::move(rows));
}

}  // namespace fixtures
