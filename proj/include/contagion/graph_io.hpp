#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "contagion/graph.hpp"

namespace contagion {

struct GraphDocument {
  WeightedGraph graph;
  std::size_t attach = 0;
  std::uint64_t seed = 0;
};

// {n, r, seed, edges: [[i,j],...], features: [[...],...], weights: [[i,j,w],...],
//  segments: [...], eigenvalues: [...]}
nlohmann::json graph_to_json(const WeightedGraph& g, std::size_t attach, std::uint64_t seed);
GraphDocument graph_from_json(const nlohmann::json& doc);

void save_graph(const std::filesystem::path& path, const WeightedGraph& g, std::size_t attach,
                std::uint64_t seed);
GraphDocument load_graph(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace contagion
