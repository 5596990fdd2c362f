#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/stats.hpp"

namespace contagion {

// Seed v0 attached to clique {v1..vk} at v1, unweighted, GI taken as 0.
struct IncubationScenario {
  std::size_t k = 10;
  double dot = 1.0;  // x_{v1} . C
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 1.0;
  std::size_t epsilon = 1;

  void validate() const;
};

// gamma (alpha (1 + dot) / 2 + beta / k), clamped to [0, 1] with a warning.
double incubation_step_prob(const IncubationScenario& s);
// 1 - (1 - step_prob)^epsilon
double incubation_eps_prob(const IncubationScenario& s);

struct CliqueScenario {
  WeightedGraph graph;
  Propagation propagation;
  NodeId seed = 0;    // v0
  NodeId bridge = 1;  // v1
};

// k+1 nodes: clique on 1..k plus the pendant edge 0-1, all weights 1.
// Features are 2-d: C = v0 = e1, v1 = (dot, sqrt(1 - dot^2)), the remaining
// clique members are -e1 (zero affinity).
CliqueScenario make_clique_scenario_graph(std::size_t k, double dot = 1.0);

// final_spread >= viral_fraction n
bool detect_virality(const CascadeRecord& rec, double viral_fraction);

// Earliest argmax of new_per_step; nullopt when nothing activates after the seeds.
std::optional<std::size_t> tipping_point(const CascadeRecord& rec);
std::optional<std::size_t> tipping_point(std::span<const std::size_t> new_per_step);

// First step whose cumulative activations reach viral_fraction n.
std::optional<std::size_t> time_to_virality(const CascadeRecord& rec, double viral_fraction);
std::optional<std::size_t> time_to_virality(std::span<const std::size_t> new_per_step,
                                            std::size_t n, double viral_fraction);

Histogram spread_histogram(std::span<const CascadeRecord> recs, std::size_t bins);

// Fraction of records with final_spread in [lo n, hi n].
double spread_mass(std::span<const CascadeRecord> recs, double lo, double hi);

}  // namespace contagion
