#include "contagion/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "contagion/error.hpp"
#include "contagion/kernels.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"

namespace contagion {

const char* to_string(VectorKind k) noexcept { return k == VectorKind::Own ? "own" : "nbr"; }

namespace {

bool nonzero(const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
}

}  // namespace

CandidatePool build_candidate_pool(const WeightedGraph& g, NodeId v, std::size_t khop, std::size_t top_degree,
                                   bool core_paths) {
  const std::size_t n = g.node_count();
  if (v >= n) throw ParamError("seed-node", "node id out of range");
  const RawGraph& raw = g.raw();
  constexpr auto kInf = std::numeric_limits<std::size_t>::max();

  // BFS with parents for hop distances and shortest paths.
  std::vector<std::size_t> dist(n, kInf);
  std::vector<NodeId> parent(n, v), order{v};
  dist[v] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    NodeId u = order[head];
    for (NodeId w : raw.neighbors(u)) {
      if (dist[w] != kInf) continue;
      dist[w] = dist[u] + 1;
      parent[w] = u;
      order.push_back(w);
    }
  }

  std::vector<std::uint8_t> in_pool(n, 0);
  in_pool[v] = 1;
  for (NodeId u : order) {
    if (dist[u] <= khop) in_pool[u] = 1;
  }
  if (top_degree > 0) {
    std::vector<NodeId> reach = order;
    std::stable_sort(reach.begin(), reach.end(), [&](NodeId a, NodeId b) {
      return raw.degree(a) != raw.degree(b) ? raw.degree(a) > raw.degree(b) : a < b;
    });
    for (std::size_t i = 0; i < std::min(top_degree, reach.size()); ++i) in_pool[reach[i]] = 1;
  }
  if (core_paths) {
    for (NodeId c : g.nodes_in(Segment::Core)) {
      if (dist[c] == kInf) continue;
      for (NodeId u = c;; u = parent[u]) {
        in_pool[u] = 1;
        if (u == v) break;
      }
    }
  }

  CandidatePool pool;
  for (std::size_t u = 0; u < n; ++u) {
    if (in_pool[u]) pool.nodes.push_back(NodeId(u));
  }
  for (NodeId u : pool.nodes) {
    auto x = g.features().row(u);
    std::vector<double> own(x.begin(), x.end());
    if (nonzero(own)) pool.candidates.push_back({u, VectorKind::Own, Propagation(own)});
    std::vector<double> sum = own;
    for (NodeId w : raw.neighbors(u)) {
      auto xw = g.features().row(w);
      for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += xw[d];
    }
    if (nonzero(sum)) pool.candidates.push_back({u, VectorKind::NeighborhoodSum, Propagation(sum)});
  }
  return pool;
}

SpreadEstimate estimate_spread(const WeightedGraph& g, const Propagation& c, NodeId v, std::size_t sims,
                               const SimParams& p, std::uint64_t rng_seed) {
  if (sims < 1) throw ParamError("sims", "must be at least 1");
  std::vector<double> spreads(sims);
  const NodeId seeds[1] = {v};
  for_each_index(sims, [&](std::size_t i) {
    spreads[i] = double(run_cascade(g, c, seeds, p, derive_seed(rng_seed, "optimizer.run", i)).final_spread);
  });
  return {mean(spreads), standard_error(spreads), sims};
}

void BeamConfig::validate() const {
  if (width < 1) throw ParamError("beam", "must be at least 1");
  if (!(perturb >= 0.0) || !std::isfinite(perturb)) throw ParamError("perturb", "must be non-negative");
  if (sims < 1) throw ParamError("sims", "must be at least 1");
  if (spawn < 1) throw ParamError("spawn", "must be at least 1");
}

namespace {

// Highest mean first; on ties the earlier entry wins.
void rank(std::vector<ScoredVector>& xs) {
  std::stable_sort(xs.begin(), xs.end(),
                   [](const ScoredVector& a, const ScoredVector& b) { return a.score.mean > b.score.mean; });
}

}  // namespace

BeamResult beam_search(const WeightedGraph& g, NodeId v, const CandidatePool& pool, const BeamConfig& cfg,
                       const SimParams& p, std::uint64_t rng_seed) {
  cfg.validate();
  if (pool.candidates.empty()) throw ParamError("pool", "candidate pool is empty");
  BeamResult res;
  std::vector<ScoredVector> beam;
  for (const Candidate& c : pool.candidates) {
    beam.push_back({c.vector, estimate_spread(g, c.vector, v, cfg.sims, p, rng_seed),
                    std::string(to_string(c.kind)) + ":" + std::to_string(c.node)});
    ++res.evaluations;
  }
  rank(beam);
  if (beam.size() > cfg.width) beam.resize(cfg.width);
  res.trace.push_back(beam.front().score.mean);

  const std::size_t dim = g.dim();
  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    std::vector<ScoredVector> next = beam;  // incumbents keep their paired scores
    if (cfg.perturb > 0.0) {
      for (std::size_t b = 0; b < beam.size(); ++b) {
        for (std::size_t j = 0; j < cfg.spawn; ++j) {
          Rng rng(derive_seed(rng_seed, "optimizer.perturb", ((round * cfg.width) + b) * cfg.spawn + j));
          std::normal_distribution<double> z(0.0, 1.0);
          std::vector<double> x(beam[b].vector.vec().begin(), beam[b].vector.vec().end());
          for (std::size_t d = 0; d < dim; ++d) x[d] += cfg.perturb * z(rng);
          if (!nonzero(x)) continue;
          Propagation child(std::move(x));
          next.push_back({child, estimate_spread(g, child, v, cfg.sims, p, rng_seed),
                          "perturb:" + std::to_string(round)});
          ++res.evaluations;
        }
      }
    }
    rank(next);
    if (next.size() > cfg.width) next.resize(cfg.width);
    beam = std::move(next);
    res.trace.push_back(beam.front().score.mean);
  }
  res.best = beam.front();
  return res;
}

void DpConfig::validate() const {
  if (codebook.empty()) throw ParamError("codebook", "needs at least one entry");
  for (const auto& c : codebook) {
    double norm = 0.0;
    for (double x : c.vec()) norm += x * x;
    if (std::abs(norm - 1.0) > 1e-9) throw ParamError("codebook", "entries must be unit vectors");
  }
  if (sims < 1) throw ParamError("dp-sims", "must be at least 1");
}

std::vector<Propagation> default_codebook(const WeightedGraph& g, NodeId v, std::uint64_t seed) {
  std::vector<Propagation> out;
  NodeId self[1] = {v};
  out.push_back(self_propagation(g, self));
  Rng rng(derive_seed(seed, "optimizer.codebook"));
  for (Segment s : {Segment::Core, Segment::Intermediate, Segment::Periphery}) {
    auto nodes = g.nodes_in(s);
    if (nodes.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    NodeId u[1] = {nodes[pick(rng)]};
    out.push_back(self_propagation(g, u));
  }
  return out;
}

Segment majority_segment(const WeightedGraph& g, std::span<const NodeId> nodes) {
  std::array<std::size_t, kSegments> count{};
  for (NodeId u : nodes) ++count[std::size_t(g.segment(u))];
  return Segment(std::size_t(std::max_element(count.begin(), count.end()) - count.begin()));
}

namespace {

std::vector<NodeId> last_adopters(const CascadeState& s) {
  std::vector<NodeId> out;
  const auto t = std::int32_t(s.step_index());
  const auto& at = s.activation_time();
  for (std::size_t u = 0; u < at.size(); ++u) {
    if (at[u] == t) out.push_back(NodeId(u));
  }
  return out;
}

struct Branch {
  std::size_t gain = 0;
  Segment next = Segment::Core;
};

Branch branch(CascadeState s, Segment current, const Propagation& c, const WeightedGraph& g, const SimParams& p,
              std::uint64_t seed) {
  Rng rng(seed);
  Branch b;
  b.gain = step(s, c, g, p, rng);
  b.next = b.gain ? majority_segment(g, last_adopters(s)) : current;
  return b;
}

}  // namespace

DpResult dp_policy(const WeightedGraph& g, NodeId v, const DpConfig& cfg, const SimParams& p,
                   std::uint64_t rng_seed) {
  cfg.validate();
  p.validate();
  if (v >= g.node_count()) throw ParamError("seed-node", "node id out of range");
  const std::size_t R = cfg.codebook.size();
  const NodeId seeds[1] = {v};

  // Snapshots of rollouts under each entry, bucketed by frontier state.
  std::vector<std::array<std::vector<CascadeState>, kSegments>> snaps(R);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t i = 0; i < cfg.sims; ++i) {
      CascadeState s(g, seeds, p);
      Rng rng(derive_seed(rng_seed, "optimizer.dp.rollout", r * cfg.sims + i));
      const std::size_t cap = p.step_cap(g.node_count());
      while (s.stable_steps() < p.epsilon && s.step_index() < cap) {
        if (step(s, cfg.codebook[r], g, p, rng) == 0) continue;
        auto& bucket = snaps[r][std::size_t(majority_segment(g, last_adopters(s)))];
        if (bucket.size() < cfg.sims) bucket.push_back(s);
      }
    }
  }

  DpResult res;
  res.entries = R;
  res.reachable.assign(R, {});
  res.reward.assign(R, {});
  res.transition.assign(R, {});
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t s = 0; s < kSegments; ++s) {
      const auto& bucket = snaps[r][s];
      res.reachable[r][s] = !bucket.empty();
      res.reward[r][s].assign(R, 0.0);
      res.transition[r][s].assign(R, {});
      if (bucket.empty()) continue;
      for (std::size_t r2 = 0; r2 < R; ++r2) {
        std::vector<Branch> out(bucket.size());
        for_each_index(bucket.size(), [&](std::size_t k) {
          // Same stream for every r2: branches are paired.
          out[k] = branch(bucket[k], Segment(s), cfg.codebook[r2], g, p,
                          derive_seed(rng_seed, "optimizer.dp.branch", (r * kSegments + s) * cfg.sims + k));
        });
        for (const Branch& b : out) {
          res.reward[r][s][r2] += double(b.gain);
          res.transition[r][s][r2][std::size_t(b.next)] += 1.0;
        }
        res.reward[r][s][r2] /= double(bucket.size());
        for (double& q : res.transition[r][s][r2]) q /= double(bucket.size());
      }
    }
  }

  // Backward induction; unreachable pairs stay at 0.
  res.value.assign(cfg.horizon + 1, std::vector<std::array<double, kSegments>>(R, std::array<double, kSegments>{}));
  for (std::size_t t = cfg.horizon; t-- > 0;) {
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t s = 0; s < kSegments; ++s) {
        if (!res.reachable[r][s]) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t r2 = 0; r2 < R; ++r2) {
          double q = res.reward[r][s][r2];
          for (std::size_t s2 = 0; s2 < kSegments; ++s2) q += res.transition[r][s][r2][s2] * res.value[t + 1][r2][s2];
          best = std::max(best, q);
        }
        res.value[t][r][s] = best;
      }
    }
  }

  // First decision from the seed-only state, paired across entries.
  const Segment start = g.segment(v);
  res.first_reward.assign(R, 0.0);
  res.first_transition.assign(R, {});
  res.first_value.assign(R, 0.0);
  CascadeState initial(g, seeds, p);
  for (std::size_t r = 0; r < R; ++r) {
    std::vector<Branch> out(cfg.sims);
    for_each_index(cfg.sims, [&](std::size_t k) {
      out[k] = branch(initial, start, cfg.codebook[r], g, p, derive_seed(rng_seed, "optimizer.dp.first", k));
    });
    for (const Branch& b : out) {
      res.first_reward[r] += double(b.gain);
      res.first_transition[r][std::size_t(b.next)] += 1.0;
    }
    res.first_reward[r] /= double(cfg.sims);
    for (double& q : res.first_transition[r]) q /= double(cfg.sims);
    double q = res.first_reward[r];
    for (std::size_t s2 = 0; s2 < kSegments; ++s2) q += res.first_transition[r][s2] * res.value[0][r][s2];
    res.first_value[r] = q;
  }
  res.recommended = std::size_t(std::max_element(res.first_value.begin(), res.first_value.end()) -
                                res.first_value.begin());
  return res;
}

}  // namespace contagion
