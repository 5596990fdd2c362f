#include <doctest.h>

#include <cmath>
#include <random>

#include "contagion/error.hpp"
#include "contagion/learner.hpp"
#include "contagion/learner_io.hpp"

using namespace contagion;

namespace {

using Trust = std::vector<std::pair<std::string, std::string>>;

// a trusts b, c trusts b, c trusts a: influence edges b->a, b->c, a->c.
InfluenceGraph triangle() {
  Trust t{{"a", "b"}, {"c", "b"}, {"c", "a"}};
  return InfluenceGraph::from_trust(t);
}

NodeId id(const InfluenceGraph& g, const char* s) { return *g.find(s); }

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Instance {
  InfluenceGraph g;
  std::vector<CascadeTrace> traces;
  ThresholdModel m;
};

Instance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = 4 + rng() % 5;
  Trust trust;
  std::bernoulli_distribution edge(0.45);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && edge(rng)) trust.emplace_back(std::to_string(a), std::to_string(b));
    }
  }
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < n; ++v) labels.push_back(std::to_string(v));
  Instance in{InfluenceGraph::from_trust(trust, labels), {}, {}};
  std::vector<Rating> ratings;
  for (int p = 0; p < 3; ++p) {
    for (std::size_t v = 0; v < n; ++v) {
      if (rng() % 2) ratings.push_back({std::to_string(v), "p" + std::to_string(p), std::int64_t(rng() % 4)});
    }
  }
  in.traces = reconstruct_traces(in.g, ratings);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  in.m = ThresholdModel::zeros(in.g, seed % 2 ? Aggregation::Sum : Aggregation::Mean);
  for (double& x : in.m.influence) x = u(rng);
  for (double& x : in.m.bias) x = u(rng);
  return in;
}

}  // namespace

TEST_CASE("trace reconstruction") {
  InfluenceGraph g = triangle();
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 3);
  std::vector<Rating> r{{"b", "x", 1}, {"a", "x", 2}, {"c", "x", 2}, {"a", "y", 5}, {"b", "y", 7}, {"c", "z", 1}};
  auto traces = reconstruct_traces(g, r);
  REQUIRE(traces.size() == 2);  // z has one rater
  const CascadeTrace& x = traces[0];
  CHECK(x.product == "x");
  CHECK(x.members == std::vector<NodeId>{id(g, "b"), id(g, "a"), id(g, "c")});
  // a and c rated together, so only b influences them.
  std::vector<std::pair<NodeId, NodeId>> want{{id(g, "b"), id(g, "a")}, {id(g, "b"), id(g, "c")}};
  auto edges = x.edges;
  std::sort(edges.begin(), edges.end());
  std::sort(want.begin(), want.end());
  CHECK(edges == want);
  CHECK(x.seed == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(x.boundary.empty());

  const CascadeTrace& y = traces[1];
  CHECK(y.edges.empty());  // b rated after a, and a does not influence b
  CHECK(y.boundary == std::vector<NodeId>{id(g, "c")});

  std::vector<Rating> bad{{"zed", "x", 1}, {"a", "x", 2}};
  CHECK_THROWS_AS(reconstruct_traces(g, bad), ParamError);
}

TEST_CASE("prediction with a saturated neighbourhood") {
  // Five incoming neighbours, all active, influence 1 each: sigma(5).
  Trust t;
  for (int i = 0; i < 5; ++i) t.emplace_back("v", "n" + std::to_string(i));
  InfluenceGraph g = InfluenceGraph::from_trust(t);
  ThresholdModel m = ThresholdModel::zeros(g, Aggregation::Sum);
  for (double& x : m.influence) x = 1.0;
  std::vector<std::uint8_t> active(g.node_count(), 1);
  const double p = predict_activation(id(g, "v"), active, g, m);
  CHECK(p > 0.99);
  CHECK(p == doctest::Approx(sig(5)));
  m.aggregation = Aggregation::Mean;
  CHECK(predict_activation(id(g, "v"), active, g, m) == doctest::Approx(sig(1)));
}

TEST_CASE("negative log likelihood of small traces") {
  InfluenceGraph g = triangle();
  ThresholdModel m = ThresholdModel::zeros(g, Aggregation::Sum);
  for (double& x : m.influence) x = 0.08;
  m.bias = {0.01, 0.02, 0.03};
  const NodeId a = id(g, "a"), b = id(g, "b"), c = id(g, "c");

  // Single member with no neighbours active and c on the boundary.
  auto lone = make_trace(g, "p", {{b, 0}});
  // b has no incoming edges: logit = bias.
  const double pb = sig(m.bias[b]);
  // Boundary a sees b active (+0.08); c sees b active and a inactive (+0.08 - 0.08).
  const double pa = sig(0.08 + m.bias[a]), pc = sig(0.0 + m.bias[c]);
  const double w = 1.0 / 2.0;
  const double expect = -std::log(pb) - w * (std::log(1 - pa) + std::log(1 - pc));
  CHECK(trace_nll(lone, g, m).loss == doctest::Approx(expect).epsilon(1e-12));
  CHECK(trace_nll(lone, g, m, BoundaryWeighting::Raw).loss ==
        doctest::Approx(-std::log(pb) - std::log(1 - pa) - std::log(1 - pc)).epsilon(1e-12));

  // b then a then c: a sees b; c sees b and a.
  auto full = make_trace(g, "q", {{b, 0}, {a, 1}, {c, 2}});
  const double full_expect = -std::log(pb) - std::log(sig(0.08 + m.bias[a])) - std::log(sig(0.16 + m.bias[c]));
  CHECK(trace_nll(full, g, m).loss == doctest::Approx(full_expect).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches finite differences") {
  int checked = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Instance in = random_instance(s);
    if (in.traces.empty()) continue;
    for (bool augment : {false, true}) {
      LossOptions opt{BoundaryWeighting::Equal, augment};
      Gradient grad;
      total_nll(in.traces, in.g, in.m, opt, &grad);
      auto numeric = [&](double& x) {
        const double h = 1e-6, keep = x;
        x = keep + h;
        const double up = total_nll(in.traces, in.g, in.m, opt).loss;
        x = keep - h;
        const double down = total_nll(in.traces, in.g, in.m, opt).loss;
        x = keep;
        return (up - down) / (2 * h);
      };
      for (std::size_t k = 0; k < in.m.influence.size(); ++k) {
        CHECK(grad.influence[k] == doctest::Approx(numeric(in.m.influence[k])).epsilon(1e-5));
      }
      for (std::size_t v = 0; v < in.m.bias.size(); ++v) {
        CHECK(grad.bias[v] == doctest::Approx(numeric(in.m.bias[v])).epsilon(1e-5));
      }
    }
    ++checked;
  }
  CHECK(checked >= 90);
}

TEST_CASE("fitting") {
  Instance in = random_instance(7);
  REQUIRE_FALSE(in.traces.empty());
  FitOptions opt;
  opt.steps = 0;
  FitResult zero = fit(in.traces, in.g, in.m, opt);
  CHECK(zero.model.influence == in.m.influence);
  CHECK(zero.loss.size() == 1);

  opt.steps = 100;
  opt.lr = 1e-3;
  ThresholdModel start = ThresholdModel::init(in.g, Aggregation::Sum, 3);
  FitResult r = fit(in.traces, in.g, start, opt);
  CHECK(r.loss.size() == 101);
  for (std::size_t i = 1; i < r.loss.size(); ++i) CHECK(r.loss[i] <= r.loss[i - 1] + 1e-12);
  for (double x : r.model.influence) {
    CHECK(x >= 0.0);
    CHECK(x <= 0.1);
  }
  for (double x : r.model.bias) {
    CHECK(x >= 0.0);
    CHECK(x <= 0.1);
  }

  // Without augmentation the option is inert.
  FitOptions plain = opt;
  plain.loss.augment = false;
  FitResult again = fit(in.traces, in.g, start, plain);
  CHECK(again.loss == r.loss);
  CHECK(again.model.influence == r.model.influence);

  opt.lr = 0;
  CHECK_THROWS_AS(fit(in.traces, in.g, start, opt), ParamError);
}

TEST_CASE("box projection") {
  InfluenceGraph g = triangle();
  ThresholdModel m = ThresholdModel::zeros(g, Aggregation::Sum);
  m.influence = {-1, 0.05, 3};
  m.project();
  CHECK(m.influence == std::vector<double>{0, 0.05, 0.1});
  m.aggregation = Aggregation::Mean;
  m.influence = {-1, 0.05, 3};
  m.project();
  CHECK(m.influence == std::vector<double>{0, 0.05, 3});
  ThresholdModel init = ThresholdModel::init(g, Aggregation::Sum, 1);
  CHECK(init.influence == ThresholdModel::init(g, Aggregation::Sum, 1).influence);
}

TEST_CASE("evaluation") {
  InfluenceGraph g = triangle();
  const NodeId a = id(g, "a"), b = id(g, "b"), c = id(g, "c");
  std::vector<CascadeTrace> traces{make_trace(g, "x", {{b, 0}, {a, 1}}), make_trace(g, "y", {{b, 0}, {c, 1}})};

  // Strong positive influence on edges from b, zero on a->c, negative bias pulls boundary nodes down.
  ThresholdModel m = ThresholdModel::zeros(g, Aggregation::Sum);
  m.influence.assign(g.edge_count(), 0.0);
  auto set = [&](NodeId from, NodeId to, double x) {
    auto nb = g.in(to);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] == from) m.influence[g.slot(to, k)] = x;
    }
  };
  set(b, a, 5);
  set(b, c, 5);
  EvalReport r = evaluate(traces, g, m);
  CHECK(r.active_nonseeds.total == 2);
  CHECK(r.active_nonseeds.correct == 2);
  // Boundary c in x and a in y both see b active: sigma(5) > 0.5, both wrong.
  CHECK(r.boundary.total == 2);
  CHECK(r.boundary.correct == 0);
  CHECK(r.pooled().value() == doctest::Approx(0.5));
  CHECK(r.majority_baseline() == doctest::Approx(0.5));

  // A constant model predicting P = 0.5 calls everything inactive.
  ThresholdModel flat = ThresholdModel::zeros(g, Aggregation::Sum);
  EvalReport f = evaluate(traces, g, flat);
  CHECK(f.active_nonseeds.correct == 0);
  CHECK(f.boundary.correct == f.boundary.total);
}

TEST_CASE("train/test split") {
  Split s = split_traces(10, 4);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 10; ++i) CHECK(all[i] == i);
  CHECK(split_traces(10, 4).test == s.test);
  CHECK_THROWS_AS(split_traces(10, 4, 0.0), ParamError);
}

TEST_CASE("model JSON round trip and TSV parsing") {
  Instance in = random_instance(11);
  auto j = model_to_json(in.m, in.g);
  ThresholdModel back = model_from_json(j, in.g);
  CHECK(back.influence == in.m.influence);
  CHECK(back.bias == in.m.bias);
  CHECK(back.aggregation == in.m.aggregation);
  j["b"].erase(0);
  CHECK_THROWS_AS(model_from_json(j, in.g), ParamError);

  auto trust = parse_trust_tsv("# comment\na\tb\n\nc\tb\n");
  CHECK(trust.size() == 2);
  CHECK(trust[1] == std::pair<std::string, std::string>{"c", "b"});
  CHECK_THROWS_AS(parse_trust_tsv("a b\n"), ParamError);
  auto ratings = parse_ratings_tsv("u\tp\t42\n");
  CHECK(ratings[0].time == 42);
  try {
    parse_ratings_tsv("u\tp\t1\nu\tp\tsoon\n");
    FAIL("expected ParamError");
  } catch (const ParamError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("ratings from simulated records") {
  CascadeRecord r;
  r.activation_time = {0, -1, 2};
  auto ratings = ratings_from_records(std::span<const CascadeRecord>(&r, 1));
  REQUIRE(ratings.size() == 2);
  CHECK(ratings[0].user == "0");
  CHECK(ratings[0].product == "c0");
  CHECK(ratings[1].time == 2);
}
