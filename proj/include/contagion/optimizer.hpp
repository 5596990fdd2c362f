#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"

namespace contagion {

enum class VectorKind { Own, NeighborhoodSum };
const char* to_string(VectorKind k) noexcept;

struct Candidate {
  NodeId node = 0;
  VectorKind kind = VectorKind::Own;
  Propagation vector;
};

struct CandidatePool {
  std::vector<NodeId> nodes;  // ascending, deduplicated
  std::vector<Candidate> candidates;
};

// Seed, nodes within K hops, the top_degree highest-degree nodes reachable
// from v, and (optionally) the nodes of one BFS shortest path from v to each
// core node. Each node contributes normalize(x_u) and normalize(x_u + sum of
// neighbour features); zero vectors are skipped.
CandidatePool build_candidate_pool(const WeightedGraph& g, NodeId v, std::size_t khop, std::size_t top_degree,
                                   bool core_paths = true);

struct SpreadEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t runs = 0;
};

// Run i uses rng seed derive_seed(rng_seed, "optimizer.run", i) whatever the
// vector, so estimates of different vectors are paired.
SpreadEstimate estimate_spread(const WeightedGraph& g, const Propagation& c, NodeId v, std::size_t sims,
                               const SimParams& p, std::uint64_t rng_seed);

struct BeamConfig {
  std::size_t width = 5;     // B
  std::size_t rounds = 5;    // T
  double perturb = 0.1;      // eps
  std::size_t sims = 200;    // M
  std::size_t spawn = 8;     // children per beam slot
  void validate() const;
};

struct ScoredVector {
  Propagation vector;
  SpreadEstimate score;
  std::string origin;  // "own:<u>", "nbr:<u>" or "perturb:<round>"
};

struct BeamResult {
  ScoredVector best;
  std::vector<double> trace;  // best mean after round 0..T
  std::size_t evaluations = 0;
};

BeamResult beam_search(const WeightedGraph& g, NodeId v, const CandidatePool& pool, const BeamConfig& cfg,
                       const SimParams& p, std::uint64_t rng_seed);

constexpr std::size_t kSegments = 3;

struct DpConfig {
  std::vector<Propagation> codebook;
  std::size_t horizon = 3;
  std::size_t sims = 50;  // rollouts per entry and snapshot cap per (entry, state)
  void validate() const;
};

// Seed feature plus the features of one random core, intermediate and
// periphery node.
std::vector<Propagation> default_codebook(const WeightedGraph& g, NodeId v, std::uint64_t seed);

// Majority segment of `nodes`; ties go to core, then intermediate.
Segment majority_segment(const WeightedGraph& g, std::span<const NodeId> nodes);

struct DpResult {
  std::size_t entries = 0;
  // value[t][r][s], t = 0..horizon, value[horizon] == 0.
  std::vector<std::vector<std::array<double, kSegments>>> value;
  std::vector<std::array<bool, kSegments>> reachable;                      // [r][s]
  std::vector<std::array<std::vector<double>, kSegments>> reward;          // [r][s][r']
  std::vector<std::array<std::vector<std::array<double, kSegments>>, kSegments>> transition;  // [r][s][r'][s']
  std::vector<double> first_reward;                                       // [r], from the seed-only state
  std::vector<std::array<double, kSegments>> first_transition;            // [r][s']
  std::vector<double> first_value;                                        // [r]
  std::size_t recommended = 0;
};

// Reward(r, s, r') is the mean number of adopters in one step taken with
// entry r' from snapshots of cascades run under r whose last-step adopters
// have majority segment s. A step with no adopters keeps the state.
// Recommends argmax_r first_reward[r] + sum_s' first_transition[r][s'] value[0][r][s'].
DpResult dp_policy(const WeightedGraph& g, NodeId v, const DpConfig& cfg, const SimParams& p,
                   std::uint64_t rng_seed);

}  // namespace contagion
