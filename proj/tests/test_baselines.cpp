#include <doctest.h>

#include <cmath>

#include "contagion/analytics.hpp"
#include "contagion/baselines.hpp"
#include "contagion/error.hpp"
#include "contagion/kernels.hpp"
#include "fixtures.hpp"

using namespace contagion;

namespace {

double mean_ic(const WeightedGraph& g, NodeId seed, double p, int runs, std::uint64_t master) {
  const NodeId s[1] = {seed};
  double total = 0;
  for (int i = 0; i < runs; ++i) total += double(run_ic(g, s, p, derive_seed(master, "test.ic", i)).final_spread);
  return total / runs;
}

}  // namespace

TEST_CASE("independent cascade examples") {
  WeightedGraph g = build_network(200, 2, 4, 3);
  const NodeId seed[1] = {7};
  CHECK(run_ic(g, seed, 0.0, 1).final_spread == 1);
  CHECK(run_ic(g, seed, 1.0, 1).final_spread == 200);

  RawGraph split(5, {{0, 1}, {1, 2}, {3, 4}});
  WeightedGraph gs = fixtures::uniform_features(split);
  const NodeId s0[1] = {0};
  CHECK(run_ic(gs, s0, 1.0, 1).final_spread == 3);

  // One Bernoulli(1/2) attempt on a single edge: expected spread 1.5.
  WeightedGraph two = fixtures::uniform_features(fixtures::path_graph(2));
  const int runs = 100000;
  const double m = mean_ic(two, 0, 0.5, runs, 2);
  CHECK(std::abs(m - 1.5) < 3 * 0.5 / std::sqrt(double(runs)));
}

TEST_CASE("independent cascade attempts each edge once") {
  // On a path the frontier advances with probability p per hop, so
  // P(spread >= k + 1) = p^k from an end node.
  WeightedGraph g = fixtures::uniform_features(fixtures::path_graph(4));
  const NodeId s[1] = {0};
  const int runs = 100000;
  int reach3 = 0;
  for (int i = 0; i < runs; ++i) reach3 += run_ic(g, s, 0.6, derive_seed(4, "test.ic.path", i)).final_spread == 4;
  const double p = 0.216, se = std::sqrt(p * (1 - p) / runs);
  CHECK(std::abs(double(reach3) / runs - p) < 3 * se);
}

TEST_CASE("independent cascade mean spread grows with p") {
  WeightedGraph g = build_network(300, 2, 4, 5);
  std::vector<double> means;
  for (int k = 1; k <= 9; ++k) means.push_back(mean_ic(g, 0, 0.1 * k, 2000, 6));
  int inversions = 0;
  for (std::size_t i = 1; i < means.size(); ++i) inversions += means[i] < means[i - 1];
  CHECK(inversions <= 1);
}

TEST_CASE("linear threshold examples") {
  WeightedGraph g = build_network(150, 2, 4, 7);
  const NodeId seed[1] = {3};
  BaselineConfig cfg;
  cfg.model = BaselineModel::LT;
  cfg.lt_threshold_dist = ThresholdDist::Constant;
  cfg.lt_theta = 0.0;
  CHECK(run_lt(g, seed, cfg, 1).final_spread == 150);
  cfg.lt_theta = 1.5;
  CHECK(run_lt(g, seed, cfg, 1).final_spread == 1);

  WeightedGraph star = fixtures::uniform_features(fixtures::star_graph(6));
  const NodeId hub[1] = {0};
  cfg.lt_theta = 0.5;
  auto r = run_lt(star, hub, cfg, 1);
  CHECK(r.final_spread == 7);
  CHECK(r.new_per_step.size() >= 2);
  CHECK(r.new_per_step[1] == 6);
}

TEST_CASE("linear threshold uses weight density") {
  // Node 1 between active 0 (weight 1) and inactive 2 (weight 0): density 1.
  RawGraph p3 = fixtures::path_graph(3);
  WeightedGraph g = fixtures::with_features(p3, 2, {1, 0, 1, 0, -1, 0});
  BaselineConfig cfg;
  cfg.model = BaselineModel::LT;
  cfg.lt_threshold_dist = ThresholdDist::Constant;
  cfg.lt_theta = 0.99;
  const NodeId s[1] = {0};
  auto r = run_lt(g, s, cfg, 1);
  CHECK(r.activation_time[1] == 1);
}

TEST_CASE("linear threshold with uniform thresholds is seeded") {
  WeightedGraph g = build_network(200, 2, 4, 9);
  const NodeId s[2] = {0, 1};
  BaselineConfig cfg;
  cfg.model = BaselineModel::LT;
  CHECK(run_lt(g, s, cfg, 5) == run_lt(g, s, cfg, 5));
}

TEST_CASE("k-complex contagion examples") {
  WeightedGraph g = build_network(300, 2, 4, 2);
  const NodeId one[1] = {0};
  CHECK(run_kcomplex(g, one, 2).final_spread == 1);
  CHECK(run_kcomplex(g, one, 1).final_spread == 300);
  CHECK(run_kcomplex(g, one, 1) == run_kcomplex(g, one, 1));

  WeightedGraph tri = fixtures::uniform_features(RawGraph(3, {{0, 1}, {1, 2}, {0, 2}}));
  const NodeId two[2] = {0, 1};
  CHECK(run_kcomplex(tri, two, 2).final_spread == 3);
}

TEST_CASE("baseline runs terminate within n rounds and stay monotone") {
  WeightedGraph g = build_network(200, 2, 4, 4);
  const NodeId s[1] = {10};
  for (auto model : {BaselineModel::IC, BaselineModel::LT, BaselineModel::KComplex}) {
    BaselineConfig cfg;
    cfg.model = model;
    cfg.ic_p = 0.3;
    cfg.k = 1;
    auto r = run_baseline(g, s, cfg, 3);
    CHECK(r.converged_at <= 200);
    std::size_t active = 0;
    for (auto t : r.activation_time) active += t >= 0;
    CHECK(active == r.final_spread);
  }
}

TEST_CASE("baseline configuration errors") {
  BaselineConfig cfg;
  cfg.ic_p = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ParamError);
  cfg.ic_p = 0.5;
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), ParamError);
  CHECK(baseline_model_from_string("kcomplex") == BaselineModel::KComplex);
  CHECK_THROWS_AS(baseline_model_from_string("sir"), ParamError);
}
