#include "contagion/baselines.hpp"

#include "contagion/error.hpp"

namespace contagion {

void BaselineConfig::validate() const {
  if (!(ic_p >= 0.0 && ic_p <= 1.0)) throw ParamError("p", "must lie in [0,1]");
  if (k < 1) throw ParamError("k", "must be at least 1");
  if (lt_threshold_dist == ThresholdDist::Constant && !(lt_theta >= 0.0)) {
    throw ParamError("theta", "must be non-negative");
  }
}

BaselineModel baseline_model_from_string(const std::string& s) {
  if (s == "ic") return BaselineModel::IC;
  if (s == "lt") return BaselineModel::LT;
  if (s == "kcomplex") return BaselineModel::KComplex;
  throw ParamError("model", "expected ic|lt|kcomplex, got '" + s + "'");
}

namespace {

struct RoundTracker {
  CascadeRecord rec;
  std::vector<std::uint8_t> active;

  RoundTracker(const WeightedGraph& g, std::span<const NodeId> seeds, std::string model,
               std::uint64_t rng_seed)
      : active(g.node_count(), 0) {
    rec.model = std::move(model);
    rec.rng_seed = rng_seed;
    rec.seed_set.assign(seeds.begin(), seeds.end());
    rec.activation_time.assign(g.node_count(), -1);
    if (seeds.empty()) throw ParamError("seeds", "seed set must be non-empty");
    for (NodeId s : seeds) {
      if (s >= g.node_count()) throw ParamError("seeds", "node id out of range");
      if (active[s]) throw ParamError("seeds", "duplicate seed " + std::to_string(s));
      active[s] = 1;
      rec.activation_time[s] = 0;
    }
    rec.new_per_step.push_back(seeds.size());
    rec.final_spread = seeds.size();
  }

  // Commits one synchronous round; returns false once nothing changed.
  bool commit(const std::vector<NodeId>& fresh) {
    const auto t = static_cast<std::int32_t>(rec.new_per_step.size());
    for (NodeId v : fresh) {
      active[v] = 1;
      rec.activation_time[v] = t;
    }
    rec.new_per_step.push_back(fresh.size());
    rec.final_spread += fresh.size();
    rec.converged_at = std::size_t(t);
    return !fresh.empty();
  }
};

}  // namespace

CascadeRecord run_ic(const WeightedGraph& g, std::span<const NodeId> seeds, double p,
                     std::uint64_t rng_seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParamError("p", "must lie in [0,1]");
  RoundTracker tr(g, seeds, "ic", rng_seed);
  tr.rec.model_params = {{"p", p}};
  Rng rng(rng_seed);
  std::vector<NodeId> frontier(seeds.begin(), seeds.end());
  std::vector<NodeId> fresh;
  std::vector<std::uint8_t> claimed(g.node_count(), 0);
  do {
    fresh.clear();
    for (NodeId u : frontier) {
      for (NodeId w : g.neighbors(u)) {
        if (tr.active[w] || claimed[w]) continue;
        if (uniform01(rng) < p) {
          claimed[w] = 1;
          fresh.push_back(w);
        }
      }
    }
    frontier = fresh;
  } while (tr.commit(fresh));
  return tr.rec;
}

CascadeRecord run_lt(const WeightedGraph& g, std::span<const NodeId> seeds,
                     const BaselineConfig& cfg, std::uint64_t rng_seed) {
  cfg.validate();
  RoundTracker tr(g, seeds, "lt", rng_seed);
  const std::size_t n = g.node_count();
  Rng rng(rng_seed);
  std::vector<double> theta(n);
  if (cfg.lt_threshold_dist == ThresholdDist::Uniform) {
    for (auto& t : theta) t = uniform01(rng);
    tr.rec.model_params = {{"theta_uniform", 1.0}};
  } else {
    std::fill(theta.begin(), theta.end(), cfg.lt_theta);
    tr.rec.model_params = {{"theta", cfg.lt_theta}};
  }

  std::vector<double> influence(n, 0.0);
  std::vector<std::size_t> exposed(n, 0);
  auto spread_from = [&](NodeId u) {
    auto nb = g.neighbors(u);
    auto w = g.neighbor_weights(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      influence[nb[i]] += w[i];
      ++exposed[nb[i]];
    }
  };
  for (NodeId s : seeds) spread_from(s);

  std::vector<NodeId> fresh;
  do {
    fresh.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (tr.active[v] || exposed[v] == 0) continue;
      double d = g.weighted_degree(NodeId(v));
      double density = d > 0.0 ? influence[v] / d : 0.0;
      if (density >= theta[v]) fresh.push_back(NodeId(v));
    }
    for (NodeId v : fresh) spread_from(v);
  } while (tr.commit(fresh));
  return tr.rec;
}

CascadeRecord run_kcomplex(const WeightedGraph& g, std::span<const NodeId> seeds, std::size_t k) {
  if (k < 1) throw ParamError("k", "must be at least 1");
  RoundTracker tr(g, seeds, "kcomplex", 0);
  tr.rec.model_params = {{"k", double(k)}};
  const std::size_t n = g.node_count();
  std::vector<std::size_t> count(n, 0);
  auto spread_from = [&](NodeId u) {
    for (NodeId w : g.neighbors(u)) ++count[w];
  };
  for (NodeId s : seeds) spread_from(s);
  std::vector<NodeId> fresh;
  do {
    fresh.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (!tr.active[v] && count[v] >= k) fresh.push_back(NodeId(v));
    }
    for (NodeId v : fresh) spread_from(v);
  } while (tr.commit(fresh));
  return tr.rec;
}

CascadeRecord run_baseline(const WeightedGraph& g, std::span<const NodeId> seeds,
                           const BaselineConfig& cfg, std::uint64_t rng_seed) {
  cfg.validate();
  switch (cfg.model) {
    case BaselineModel::IC: return run_ic(g, seeds, cfg.ic_p, rng_seed);
    case BaselineModel::LT: return run_lt(g, seeds, cfg, rng_seed);
    case BaselineModel::KComplex: return run_kcomplex(g, seeds, cfg.k);
  }
  throw ParamError("model", "unknown baseline");
}

}  // namespace contagion
