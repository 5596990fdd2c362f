#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "contagion/dynamics.hpp"

namespace contagion {

enum class BaselineModel { IC, LT, KComplex };
enum class ThresholdDist { Uniform, Constant };

struct BaselineConfig {
  BaselineModel model = BaselineModel::IC;
  double ic_p = 0.1;
  ThresholdDist lt_threshold_dist = ThresholdDist::Uniform;
  double lt_theta = 0.5;  // used when lt_threshold_dist == Constant
  std::size_t k = 2;

  void validate() const;
};

BaselineModel baseline_model_from_string(const std::string& s);

// Independent cascade on unweighted edges: a node activated in round t-1
// makes one Bernoulli(p) attempt on each inactive neighbour in round t.
CascadeRecord run_ic(const WeightedGraph& g, std::span<const NodeId> seeds, double p,
                     std::uint64_t rng_seed);

// Linear threshold with density influence sum_{active w} A_vw / d_v >= theta_v.
// Thresholds are drawn once per run; a node needs at least one active
// neighbour to activate.
CascadeRecord run_lt(const WeightedGraph& g, std::span<const NodeId> seeds,
                     const BaselineConfig& cfg, std::uint64_t rng_seed);

// Deterministic k-complex contagion on unweighted neighbour counts.
CascadeRecord run_kcomplex(const WeightedGraph& g, std::span<const NodeId> seeds, std::size_t k);

CascadeRecord run_baseline(const WeightedGraph& g, std::span<const NodeId> seeds,
                           const BaselineConfig& cfg, std::uint64_t rng_seed);

}  // namespace contagion
