#include <doctest.h>

#include <cmath>

#include "contagion/analytics.hpp"
#include "contagion/error.hpp"
#include "contagion/stats.hpp"

using namespace contagion;

namespace {

CascadeRecord record(std::vector<std::size_t> per_step, std::size_t n) {
  CascadeRecord r;
  r.new_per_step = per_step;
  r.activation_time.assign(n, -1);
  std::size_t v = 0;
  for (std::size_t t = 0; t < per_step.size(); ++t) {
    for (std::size_t i = 0; i < per_step[t]; ++i) r.activation_time[v++] = std::int32_t(t);
  }
  r.final_spread = v;
  return r;
}

}  // namespace

TEST_CASE("incubation probability examples") {
  IncubationScenario s;
  CHECK(incubation_step_prob(s) == doctest::Approx(22.0 / 40.0));
  CHECK(incubation_eps_prob(s) == doctest::Approx(0.55));
  s.epsilon = 2;
  CHECK(incubation_eps_prob(s) == doctest::Approx(0.7975));
  s.k = 1000000;
  CHECK(incubation_step_prob(s) == doctest::Approx(0.5).epsilon(1e-5));
  IncubationScenario dark;
  dark.dot = -1;
  dark.beta = 1e-9;
  dark.alpha = 0.5;
  CHECK(incubation_step_prob(dark) < 1e-8);
  IncubationScenario zero;
  zero.gamma = 0;
  zero.epsilon = 7;
  CHECK(incubation_eps_prob(zero) == 0.0);
}

TEST_CASE("smaller cliques favour incubation and longer windows help") {
  IncubationScenario s;
  double prev = 2;
  for (std::size_t k = 2; k <= 50; ++k) {
    s.k = k;
    double p = incubation_step_prob(s);
    CHECK(p < prev);
    prev = p;
  }
  s.k = 10;
  prev = -1;
  for (std::size_t e = 1; e <= 20; ++e) {
    s.epsilon = e;
    double p = incubation_eps_prob(s);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("incubation clamps with a warning and validates k") {
  IncubationScenario s;
  s.gamma = 3;
  CHECK(incubation_step_prob(s) == 1.0);
  s.k = 1;
  CHECK_THROWS_AS(s.validate(), ParamError);
}

TEST_CASE("clique scenario graph") {
  auto three = make_clique_scenario_graph(3);
  CHECK(three.graph.node_count() == 4);
  CHECK(three.graph.raw().edge_count() == 4);
  auto two = make_clique_scenario_graph(2);
  CHECK(two.graph.node_count() == 3);
  CHECK(two.graph.raw().edge_count() == 2);
  auto ten = make_clique_scenario_graph(10, 0.3);
  CHECK(ten.graph.raw().degree(ten.bridge) == 10);
  double dot = 0;
  for (std::size_t d = 0; d < ten.graph.dim(); ++d) {
    dot += ten.graph.features().row(ten.bridge)[d] * ten.propagation.vec()[d];
  }
  CHECK(dot == doctest::Approx(0.3));
  for (double w : ten.graph.csr_weights()) CHECK(w == 1.0);
}

TEST_CASE("virality detection") {
  CHECK(detect_virality(record({1, 599}, 1000), 0.5));
  CHECK_FALSE(detect_virality(record({1, 498}, 1000), 0.5));
  CHECK_FALSE(detect_virality(record({1}, 1000), 0.01));
}

TEST_CASE("tipping point") {
  CHECK(tipping_point(std::vector<std::size_t>{1, 1, 5, 2}) == 2u);
  CHECK(tipping_point(std::vector<std::size_t>{3, 3, 3}) == 0u);
  CHECK_FALSE(tipping_point(std::vector<std::size_t>{1, 0, 0}).has_value());
}

TEST_CASE("time to virality") {
  CHECK(time_to_virality(std::vector<std::size_t>{1, 1, 598}, 1000, 0.5) == 2u);
  CHECK_FALSE(time_to_virality(std::vector<std::size_t>{1, 1, 5}, 1000, 0.5).has_value());
  CHECK(time_to_virality(std::vector<std::size_t>{600, 3}, 1000, 0.5) == 0u);
}

TEST_CASE("spread mass and histogram") {
  std::vector<CascadeRecord> recs{record({1}, 10), record({1, 4}, 10), record({1, 9}, 10)};
  CHECK(spread_mass(recs, 0.2, 0.8) == doctest::Approx(1.0 / 3));
  Histogram h = spread_histogram(recs, 3);
  CHECK(h.counts == std::vector<std::size_t>{1, 1, 1});
  Histogram ones = histogram(std::vector<double>{1, 1, 2}, 2);
  CHECK(ones.counts == std::vector<std::size_t>{2, 1});
  Histogram flat = histogram(std::vector<double>{4, 4}, 5);
  CHECK(flat.counts.size() == 1);
  Histogram ranged = histogram(std::vector<double>{0, 10}, 5, std::pair<double, double>{0, 10});
  CHECK(ranged.counts.front() == 1);
  CHECK(ranged.counts.back() == 1);
}

TEST_CASE("rank correlations") {
  std::vector<double> a{1, 2, 3, 4, 5}, rev{5, 4, 3, 2, 1};
  CHECK(spearman(a, a) == doctest::Approx(1.0));
  CHECK(spearman(a, rev) == doctest::Approx(-1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1, 1, 1}, a), std::domain_error);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), std::invalid_argument);
  CHECK(average_ranks(std::vector<double>{10, 20, 20, 30}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(kendall_tau(a, a) == doctest::Approx(1.0));
  CHECK(kendall_tau(a, rev) == doctest::Approx(-1.0));
  // One discordant pair of six among four untied points.
  CHECK(kendall_tau(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 4, 3}) ==
        doctest::Approx(4.0 / 6.0));
}

TEST_CASE("moments") {
  std::vector<double> x{1, 2, 3, 4};
  CHECK(mean(x) == 2.5);
  CHECK(standard_error(x) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(standard_error(std::vector<double>{7}) == 0.0);
}
