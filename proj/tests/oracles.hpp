#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "contagion/dynamics.hpp"

namespace oracles {

// Activation probability of inactive v written out from the definitions,
// with no use of the library's cached sums.
inline double up_probability(const contagion::WeightedGraph& g, const contagion::Propagation& c,
                             std::uint32_t mask, contagion::NodeId v, const contagion::SimParams& p) {
  const std::size_t n = g.node_count();
  double dot = 0;
  for (std::size_t d = 0; d < g.dim(); ++d) dot += c.vec()[d] * g.features().row(v)[d];
  const double f = (1 + dot) / 2;
  double on = 0, off = 0;
  for (contagion::NodeId w : g.neighbors(v)) {
    (mask >> w & 1 ? on : off) += g.weight(v, w);
  }
  const double li = (on - off) / (on + off);
  const double local = p.local_form == contagion::LocalForm::Signed ? li : (1 + li) / 2;
  const double gi = double(__builtin_popcount(mask)) / double(n);
  const double agg = p.gamma * (p.alpha * f + p.beta * local + (1 - p.alpha - p.beta) * gi);
  return std::clamp(agg, 0.0, 1.0);
}

// Exact distribution of the final spread (index = number of active nodes),
// enumerating every Bernoulli outcome of every synchronous step. Needs a
// small graph and a finite step cap.
inline std::vector<double> spread_distribution(const contagion::WeightedGraph& g, const contagion::Propagation& c,
                                               const std::vector<contagion::NodeId>& seeds,
                                               const contagion::SimParams& p) {
  const std::size_t n = g.node_count();
  const std::size_t cap = p.step_cap(n);
  std::vector<double> dist(n + 1, 0.0);
  std::uint32_t start = 0;
  for (auto s : seeds) start |= 1u << s;
  std::function<void(std::uint32_t, std::size_t, std::size_t, double)> go = [&](std::uint32_t mask, std::size_t t,
                                                                                std::size_t stable, double mass) {
    if (stable >= p.epsilon || t >= cap) {
      dist[__builtin_popcount(mask)] += mass;
      return;
    }
    std::vector<contagion::NodeId> inactive;
    std::vector<double> prob;
    for (contagion::NodeId v = 0; v < n; ++v) {
      if (!(mask >> v & 1)) {
        inactive.push_back(v);
        prob.push_back(up_probability(g, c, mask, v, p));
      }
    }
    for (std::uint32_t sub = 0; sub < (1u << inactive.size()); ++sub) {
      double m = mass;
      std::uint32_t next = mask;
      for (std::size_t i = 0; i < inactive.size(); ++i) {
        if (sub >> i & 1) {
          m *= prob[i];
          next |= 1u << inactive[i];
        } else {
          m *= 1 - prob[i];
        }
      }
      if (m == 0) continue;
      go(next, t + 1, next == mask ? stable + 1 : 0, m);
    }
  };
  go(start, 0, 0, 1.0);
  return dist;
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return tv / 2;
}

}  // namespace oracles
