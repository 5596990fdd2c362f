#include "contagion/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/error.hpp"
#include "contagion/log.hpp"

namespace contagion {

void IncubationScenario::validate() const {
  if (k < 2) throw ParamError("k", "clique size must be at least 2");
  if (!(dot >= -1.0 && dot <= 1.0)) throw ParamError("dot", "must lie in [-1,1]");
  if (epsilon < 1) throw ParamError("epsilon", "must be at least 1");
}

double incubation_step_prob(const IncubationScenario& s) {
  s.validate();
  double raw = s.gamma * (s.alpha * (1.0 + s.dot) / 2.0 + s.beta / double(s.k));
  if (raw < 0.0 || raw > 1.0) {
    log::warn("incubation step probability " + std::to_string(raw) + " clamped to [0,1]");
  }
  return std::clamp(raw, 0.0, 1.0);
}

double incubation_eps_prob(const IncubationScenario& s) {
  const double q = incubation_step_prob(s);
  return 1.0 - std::pow(1.0 - q, double(s.epsilon));
}

CliqueScenario make_clique_scenario_graph(std::size_t k, double dot) {
  if (k < 2) throw ParamError("k", "clique size must be at least 2");
  if (!(dot >= -1.0 && dot <= 1.0)) throw ParamError("dot", "must lie in [-1,1]");
  std::vector<std::pair<NodeId, NodeId>> edges{{0, 1}};
  for (NodeId i = 1; i <= k; ++i) {
    for (NodeId j = i + 1; j <= k; ++j) edges.emplace_back(i, j);
  }
  RawGraph raw(k + 1, std::move(edges));

  FeatureMatrix f;
  f.rows = k + 1;
  f.dim = 2;
  f.values.assign(2 * (k + 1), 0.0);
  f.values[0] = 1.0;
  f.values[2] = dot;
  f.values[3] = std::sqrt(std::max(0.0, 1.0 - dot * dot));
  for (std::size_t v = 2; v <= k; ++v) f.values[2 * v] = -1.0;

  std::vector<double> ones(2 * raw.edge_count(), 1.0);
  return CliqueScenario{WeightedGraph(std::move(raw), std::move(f), std::move(ones)),
                        Propagation({1.0, 0.0}), 0, 1};
}

bool detect_virality(const CascadeRecord& rec, double viral_fraction) {
  return double(rec.final_spread) >= viral_fraction * double(rec.node_count());
}

std::optional<std::size_t> tipping_point(std::span<const std::size_t> nps) {
  if (nps.size() < 2 || std::all_of(nps.begin() + 1, nps.end(), [](auto x) { return x == 0; })) {
    return std::nullopt;
  }
  return std::size_t(std::max_element(nps.begin(), nps.end()) - nps.begin());
}

std::optional<std::size_t> tipping_point(const CascadeRecord& rec) {
  return tipping_point(rec.new_per_step);
}

std::optional<std::size_t> time_to_virality(std::span<const std::size_t> nps, std::size_t n,
                                            double viral_fraction) {
  const double target = viral_fraction * double(n);
  std::size_t cumulative = 0;
  for (std::size_t t = 0; t < nps.size(); ++t) {
    cumulative += nps[t];
    if (double(cumulative) >= target) return t;
  }
  return std::nullopt;
}

std::optional<std::size_t> time_to_virality(const CascadeRecord& rec, double viral_fraction) {
  return time_to_virality(rec.new_per_step, rec.node_count(), viral_fraction);
}

Histogram spread_histogram(std::span<const CascadeRecord> recs, std::size_t bins) {
  std::vector<double> spreads;
  spreads.reserve(recs.size());
  for (const auto& r : recs) spreads.push_back(double(r.final_spread));
  return histogram(spreads, bins);
}

double spread_mass(std::span<const CascadeRecord> recs, double lo, double hi) {
  if (recs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& r : recs) {
    const double n = double(r.node_count());
    const double s = double(r.final_spread);
    if (s >= lo * n && s <= hi * n) ++hits;
  }
  return double(hits) / double(recs.size());
}

}  // namespace contagion
