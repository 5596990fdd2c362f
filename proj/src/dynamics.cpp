#include "contagion/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contagion/error.hpp"
#include "contagion/log.hpp"

namespace contagion {

Propagation::Propagation(std::vector<double> v) : vec_(std::move(v)) {
  double norm = 0.0;
  for (double x : vec_) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ParamError("propagation", "vector must be finite and non-zero");
  }
  for (double& x : vec_) x /= norm;
}

const char* to_string(LocalForm f) noexcept {
  return f == LocalForm::Signed ? "signed" : "scaled";
}

LocalForm local_form_from_string(const std::string& s) {
  if (s == "signed") return LocalForm::Signed;
  if (s == "scaled") return LocalForm::Scaled;
  throw ParamError("local-form", "expected 'signed' or 'scaled', got '" + s + "'");
}

void SimParams::validate() const {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(alpha)) throw ParamError("alpha", "must lie in [0,1]");
  if (!unit(beta)) throw ParamError("beta", "must lie in [0,1]");
  if (alpha + beta > 1.0 + 1e-12) throw ParamError("beta", "alpha + beta must not exceed 1");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ParamError("gamma", "must be non-negative");
  if (epsilon < 1) throw ParamError("epsilon", "must be at least 1");
  if (!unit(lambda)) throw ParamError("lambda", "must lie in [0,1]");
  if (!(viral_fraction > 0.0 && viral_fraction <= 1.0)) {
    throw ParamError("viral-fraction", "must lie in (0,1]");
  }
}

namespace {

// Shared by the per-node path and the stepping loop so both produce the same bits.
inline double combine(double affinity_score, double active_w, double degree, double gi,
                      const SimParams& p) {
  if (!(degree > 0.0)) throw std::domain_error("local influence undefined for zero degree");
  double li = (2.0 * active_w - degree) / degree;
  double local = p.local_form == LocalForm::Signed ? li : (1.0 + li) / 2.0;
  double raw = p.gamma * (p.alpha * affinity_score + p.beta * local + p.global_weight() * gi);
  return std::clamp(raw, 0.0, 1.0);
}

std::size_t mirror_slot(const WeightedGraph& g, NodeId from, NodeId to) {
  auto nb = g.neighbors(from);
  auto it = std::lower_bound(nb.begin(), nb.end(), to);
  return g.slot_begin(from) + std::size_t(it - nb.begin());
}

}  // namespace

double affinity(std::span<const double> c, std::span<const double> x) noexcept {
  double dot = 0.0;
  for (std::size_t d = 0; d < c.size(); ++d) dot += c[d] * x[d];
  return (1.0 + dot) / 2.0;
}

CascadeState::CascadeState(const WeightedGraph& g, std::span<const NodeId> seeds,
                           const SimParams& p)
    : g_(&g),
      active_(g.node_count(), 0),
      activation_time_(g.node_count(), -1),
      active_weight_(g.node_count(), 0.0) {
  if (p.lambda > 0.0 || p.dynamic_weights) {
    live_features_ = g.features().values;
    live_weights_ = g.csr_weights();
    live_degree_ = g.weighted_degrees();
  }
  for (NodeId s : seeds) {
    if (s >= g.node_count()) throw ParamError("seeds", "node id " + std::to_string(s) + " out of range");
    if (active_[s]) throw ParamError("seeds", "duplicate seed " + std::to_string(s));
    activate(s, 0);
  }
}

std::span<const double> CascadeState::neighbor_weights(NodeId v) const {
  if (!live_weights_) return g_->neighbor_weights(v);
  return {live_weights_->data() + g_->slot_begin(v), g_->raw().degree(v)};
}

std::span<const double> CascadeState::feature(NodeId v) const {
  if (!live_features_) return g_->features().row(v);
  const std::size_t k = g_->dim();
  return {live_features_->data() + v * k, k};
}

void CascadeState::activate(NodeId v, std::int32_t t) {
  active_[v] = 1;
  activation_time_[v] = t;
  ++active_count_;
  auto nb = g_->neighbors(v);
  auto w = neighbor_weights(v);
  for (std::size_t i = 0; i < nb.size(); ++i) active_weight_[nb[i]] += w[i];
}

void CascadeState::assign_active(const std::vector<std::uint8_t>& active) {
  if (active.size() != active_.size()) throw ParamError("active", "size mismatch");
  std::fill(active_.begin(), active_.end(), 0);
  std::fill(activation_time_.begin(), activation_time_.end(), -1);
  std::fill(active_weight_.begin(), active_weight_.end(), 0.0);
  active_count_ = 0;
  for (std::size_t v = 0; v < active.size(); ++v) {
    if (active[v]) activate(NodeId(v), 0);
  }
}

void CascadeState::apply_drift(NodeId u, const Propagation& c, double lambda) {
  const std::size_t k = g_->dim();
  auto current = feature(u);
  DriftResult moved = drift_update(current, c.vec(), lambda);
  if (moved.degenerate) {
    log::warn("drift: antipodal update for node " + std::to_string(u) + " left feature unchanged");
    return;
  }
  if (std::equal(moved.feature.begin(), moved.feature.end(), current.begin())) return;
  std::copy(moved.feature.begin(), moved.feature.end(), live_features_->begin() + u * k);

  auto& weights = *live_weights_;
  auto& degree = *live_degree_;
  auto nb = g_->neighbors(u);
  const std::size_t base = g_->slot_begin(u);
  for (std::size_t i = 0; i < nb.size(); ++i) {
    NodeId w = nb[i];
    NodeId lo = std::min(u, w), hi = std::max(u, w);
    double fresh = calibrated_weight(feature(lo), feature(hi));
    double delta = fresh - weights[base + i];
    weights[base + i] = fresh;
    weights[mirror_slot(*g_, w, u)] = fresh;
    degree[u] += delta;
    degree[w] += delta;
    if (active_[u]) active_weight_[w] += delta;
    if (active_[w]) active_weight_[u] += delta;
  }
}

double signed_local_influence(NodeId v, const CascadeState& s) {
  double d = s.degree(v);
  if (!(d > 0.0)) throw std::domain_error("local influence undefined for node " + std::to_string(v));
  return (2.0 * s.active_weight(v) - d) / d;
}

double local_influence(NodeId v, const CascadeState& s) {
  return (1.0 + signed_local_influence(v, s)) / 2.0;
}

double global_influence(const CascadeState& s, std::size_t n) noexcept {
  return n == 0 ? 0.0 : double(s.active_count()) / double(n);
}

double activation_prob(NodeId v, const CascadeState& s, const Propagation& c,
                       const WeightedGraph& g, const SimParams& p) {
  return combine(affinity(c.vec(), s.feature(v)), s.active_weight(v), s.degree(v),
                 global_influence(s, g.node_count()), p);
}

std::size_t step(CascadeState& s, const Propagation& c, const WeightedGraph& g,
                 const SimParams& p, Rng& rng) {
  const std::size_t n = g.node_count();
  if (!std::equal(s.bound_.begin(), s.bound_.end(), c.vec().begin(), c.vec().end())) {
    s.bound_.assign(c.vec().begin(), c.vec().end());
    s.affinity_.resize(n);
    for (std::size_t v = 0; v < n; ++v) s.affinity_[v] = affinity(c.vec(), s.feature(NodeId(v)));
  }

  const double gi = global_influence(s, n);
  s.scratch_.clear();
  for (std::size_t v = 0; v < n; ++v) {
    if (s.active_[v]) continue;
    double prob = combine(s.affinity_[v], s.active_weight_[v], s.degree(NodeId(v)), gi, p);
    if (prob <= 0.0) continue;
    if (prob >= 1.0 || uniform01(rng) < prob) s.scratch_.push_back(NodeId(v));
  }

  ++s.step_;
  const auto t = static_cast<std::int32_t>(s.step_);
  for (NodeId v : s.scratch_) s.activate(v, t);
  if (s.drifting()) {
    for (NodeId v : s.scratch_) s.apply_drift(v, c, p.lambda);
  }
  s.stable_steps_ = s.scratch_.empty() ? s.stable_steps_ + 1 : 0;
  return s.scratch_.size();
}

CascadeRecord finish_cascade(CascadeState& s, const WeightedGraph& g, const Propagation& c,
                             std::span<const NodeId> seeds, const SimParams& p,
                             std::uint64_t rng_seed, Rng& rng) {
  CascadeRecord rec;
  rec.params = p;
  rec.seed_set.assign(seeds.begin(), seeds.end());
  rec.propagation.assign(c.vec().begin(), c.vec().end());
  rec.rng_seed = rng_seed;
  rec.new_per_step.push_back(seeds.size());
  const std::size_t cap = p.step_cap(g.node_count());
  while (s.stable_steps() < p.epsilon && s.step_index() < cap) {
    rec.new_per_step.push_back(step(s, c, g, p, rng));
  }
  rec.activation_time = s.activation_time();
  rec.final_spread = s.active_count();
  rec.converged_at = s.step_index();
  rec.hit_cap = s.stable_steps() < p.epsilon;
  return rec;
}

CascadeRecord run_cascade(const WeightedGraph& g, const Propagation& c,
                          std::span<const NodeId> seeds, const SimParams& p,
                          std::uint64_t rng_seed) {
  p.validate();
  if (seeds.empty()) throw ParamError("seeds", "seed set must be non-empty");
  if (c.dim() != g.dim()) throw ParamError("propagation", "dimension does not match features");
  CascadeState s(g, seeds, p);
  Rng rng(rng_seed);
  return finish_cascade(s, g, c, seeds, p, rng_seed, rng);
}

std::vector<double> step_probs_matrix(const CascadeState& s, const Propagation& c,
                                      const WeightedGraph& g, const SimParams& p) {
  const std::size_t n = g.node_count();
  std::vector<double> signed_state(n);
  for (std::size_t v = 0; v < n; ++v) signed_state[v] = s.is_active(NodeId(v)) ? 1.0 : -1.0;
  const double gi = global_influence(s, n);

  std::vector<double> out(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto nb = g.neighbors(NodeId(v));
    auto w = s.neighbor_weights(NodeId(v));
    double row = 0.0;  // (A (2Y - 1))_v
    for (std::size_t i = 0; i < nb.size(); ++i) row += w[i] * signed_state[nb[i]];
    double d = s.degree(NodeId(v));
    if (!(d > 0.0)) throw std::domain_error("local influence undefined for zero degree");
    double li = row / d;  // (D^-1 A (2Y - 1))_v
    double local = p.local_form == LocalForm::Signed ? li : (li + 1.0) / 2.0;
    double f = affinity(c.vec(), s.feature(NodeId(v)));
    out[v] = std::clamp(p.gamma * (p.alpha * f + p.beta * local + p.global_weight() * gi), 0.0, 1.0);
  }
  return out;
}

DriftResult drift_update(std::span<const double> x, std::span<const double> c, double lambda) {
  DriftResult out{std::vector<double>(x.begin(), x.end()), false};
  if (lambda == 0.0) return out;
  if (lambda == 1.0) {
    out.feature.assign(c.begin(), c.end());
    return out;
  }
  std::vector<double> mixed(x.size());
  double norm = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    mixed[d] = (1.0 - lambda) * x[d] + lambda * c[d];
    norm += mixed[d] * mixed[d];
  }
  norm = std::sqrt(norm);
  if (norm < 1e-15) {
    out.degenerate = true;
    return out;
  }
  for (double& m : mixed) m /= norm;
  out.feature = std::move(mixed);
  return out;
}

Propagation misaligned_propagation(std::span<const double> seed_feature, double cosine, Rng& rng) {
  if (!(cosine >= -1.0 && cosine <= 1.0)) throw ParamError("seed-affinity", "cosine must lie in [-1,1]");
  const std::size_t k = seed_feature.size();
  std::vector<double> x(seed_feature.begin(), seed_feature.end());
  if (std::abs(cosine) == 1.0) {
    for (double& v : x) v *= cosine;
    return Propagation(std::move(x));
  }
  double xn = 0.0;
  for (double v : x) xn += v * v;
  xn = std::sqrt(xn);
  for (double& v : x) v /= xn;
  if (k < 2) throw ParamError("seed-affinity", "need dimension >= 2 for |cosine| < 1");

  std::normal_distribution<double> gauss;
  std::vector<double> u(k);
  double un = 0.0;
  do {
    for (double& v : u) v = gauss(rng);
    double proj = 0.0;
    for (std::size_t d = 0; d < k; ++d) proj += u[d] * x[d];
    for (std::size_t d = 0; d < k; ++d) u[d] -= proj * x[d];
    un = 0.0;
    for (double v : u) un += v * v;
    un = std::sqrt(un);
  } while (un < 1e-12);
  const double sine = std::sqrt(1.0 - cosine * cosine);
  std::vector<double> out(k);
  for (std::size_t d = 0; d < k; ++d) out[d] = cosine * x[d] + sine * u[d] / un;
  return Propagation(std::move(out));
}

Propagation self_propagation(const WeightedGraph& g, std::span<const NodeId> seeds) {
  if (seeds.empty()) throw ParamError("seeds", "seed set must be non-empty");
  std::vector<double> sum(g.dim(), 0.0);
  for (NodeId s : seeds) {
    auto row = g.features().row(s);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += row[d];
  }
  return Propagation(std::move(sum));
}

}  // namespace contagion
