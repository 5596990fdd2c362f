#include "contagion/graph_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "contagion/error.hpp"

namespace contagion {

using nlohmann::json;

json graph_to_json(const WeightedGraph& g, std::size_t attach, std::uint64_t seed) {
  json doc;
  doc["n"] = g.node_count();
  doc["r"] = attach;
  doc["seed"] = seed;
  json edges = json::array();
  json weights = json::array();
  for (auto [a, b] : g.raw().edges()) {
    edges.push_back({a, b});
    weights.push_back({a, b, g.weight(a, b)});
  }
  doc["edges"] = std::move(edges);
  json features = json::array();
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    auto row = g.features().row(v);
    features.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["features"] = std::move(features);
  doc["weights"] = std::move(weights);
  json segments = json::array();
  for (auto s : g.segments()) segments.push_back(to_string(s));
  doc["segments"] = std::move(segments);
  doc["eigenvalues"] = g.features().eigenvalues;
  return doc;
}

GraphDocument graph_from_json(const json& doc) {
  const auto n = doc.at("n").get<std::size_t>();
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& e : doc.at("edges")) edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
  RawGraph raw(n, std::move(edges));

  FeatureMatrix f;
  const auto& rows = doc.at("features");
  if (rows.size() != n) throw ParamError("features", "expected one row per node");
  f.rows = n;
  f.dim = n == 0 ? 0 : rows.at(0).size();
  f.values.reserve(n * f.dim);
  for (const auto& row : rows) {
    if (row.size() != f.dim) throw ParamError("features", "ragged feature rows");
    for (const auto& x : row) f.values.push_back(x.get<double>());
  }
  if (doc.contains("eigenvalues")) f.eigenvalues = doc["eigenvalues"].get<std::vector<double>>();

  std::vector<double> csr;
  csr.reserve(2 * raw.edge_count());
  if (doc.contains("weights")) {
    // Index the listed weights by CSR slot.
    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + raw.degree(NodeId(v));
    csr.assign(offsets[n], -1.0);
    auto slot = [&](NodeId a, NodeId b) -> double& {
      auto nb = raw.neighbors(a);
      auto it = std::lower_bound(nb.begin(), nb.end(), b);
      if (it == nb.end() || *it != b) throw ParamError("weights", "weight listed for a non-edge");
      return csr[offsets[a] + std::size_t(it - nb.begin())];
    };
    for (const auto& w : doc["weights"]) {
      auto a = w.at(0).get<NodeId>(), b = w.at(1).get<NodeId>();
      double val = w.at(2).get<double>();
      slot(a, b) = val;
      slot(b, a) = val;
    }
    for (double x : csr) {
      if (x < 0.0) throw ParamError("weights", "missing weight for an edge");
    }
    GraphDocument out{WeightedGraph(std::move(raw), std::move(f), std::move(csr)), 0, 0};
    out.attach = doc.value("r", std::size_t{0});
    out.seed = doc.value("seed", std::uint64_t{0});
    return out;
  }
  GraphDocument out{assign_edge_weights(std::move(raw), std::move(f)), 0, 0};
  out.attach = doc.value("r", std::size_t{0});
  out.seed = doc.value("seed", std::uint64_t{0});
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void save_graph(const std::filesystem::path& path, const WeightedGraph& g, std::size_t attach,
                std::uint64_t seed) {
  write_text_file(path, graph_to_json(g, attach, seed).dump() + "\n");
}

GraphDocument load_graph(const std::filesystem::path& path) {
  return graph_from_json(read_json_file(path));
}

}  // namespace contagion
