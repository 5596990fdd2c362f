#include "contagion/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "contagion/error.hpp"
#include "contagion/kernels.hpp"
#include "contagion/log.hpp"
#include "contagion/rng.hpp"

namespace contagion {

namespace {
constexpr double kProbFloor = 1e-12;
}

void InfluenceGraph::build(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  in_off_.assign(n + 1, 0);
  out_off_.assign(n + 1, 0);
  for (auto [from, to] : edges) {
    ++in_off_[to + 1];
    ++out_off_[from + 1];
  }
  std::partial_sum(in_off_.begin(), in_off_.end(), in_off_.begin());
  std::partial_sum(out_off_.begin(), out_off_.end(), out_off_.begin());
  in_.assign(edges.size(), 0);
  out_.assign(edges.size(), 0);
  std::vector<std::size_t> in_fill(in_off_.begin(), in_off_.end() - 1);
  std::vector<std::size_t> out_fill(out_off_.begin(), out_off_.end() - 1);
  // edges are sorted by source, so out lists come out ascending; in lists
  // are sorted afterwards.
  for (auto [from, to] : edges) {
    in_[in_fill[to]++] = from;
    out_[out_fill[from]++] = to;
  }
  for (std::size_t v = 0; v < n; ++v) std::sort(in_.begin() + long(in_off_[v]), in_.begin() + long(in_off_[v + 1]));
}

InfluenceGraph InfluenceGraph::from_trust(std::span<const std::pair<std::string, std::string>> trust,
                                          std::span<const std::string> extra_nodes) {
  InfluenceGraph g;
  auto intern = [&](const std::string& s) {
    auto [it, fresh] = g.index_.emplace(s, NodeId(g.labels_.size()));
    if (fresh) g.labels_.push_back(s);
    return it->second;
  };
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& [truster, trustee] : trust) {
    NodeId u = intern(truster), v = intern(trustee);
    if (u != v) edges.emplace_back(v, u);  // trustee influences truster
  }
  for (const auto& s : extra_nodes) intern(s);
  g.build(g.labels_.size(), std::move(edges));
  return g;
}

InfluenceGraph InfluenceGraph::from_graph(const RawGraph& raw) {
  InfluenceGraph g;
  const std::size_t n = raw.node_count();
  for (std::size_t v = 0; v < n; ++v) {
    g.labels_.push_back(std::to_string(v));
    g.index_.emplace(g.labels_.back(), NodeId(v));
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (auto [a, b] : raw.edges()) {
    edges.emplace_back(a, b);
    edges.emplace_back(b, a);
  }
  g.build(n, std::move(edges));
  return g;
}

std::optional<NodeId> InfluenceGraph::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int64_t> CascadeTrace::time_of(NodeId v) const {
  auto it = std::lower_bound(by_node_.begin(), by_node_.end(), std::make_pair(v, std::numeric_limits<std::int64_t>::min()));
  if (it == by_node_.end() || it->first != v) return std::nullopt;
  return it->second;
}

CascadeTrace make_trace(const InfluenceGraph& g, std::string product,
                        std::vector<std::pair<NodeId, std::int64_t>> acts) {
  CascadeTrace t;
  t.product = std::move(product);
  std::sort(acts.begin(), acts.end());
  // Sorted by (node, time): the first entry per node is its earliest time.
  acts.erase(std::unique(acts.begin(), acts.end(), [](auto& a, auto& b) { return a.first == b.first; }),
             acts.end());
  t.by_node_ = acts;

  std::sort(acts.begin(), acts.end(), [](auto& a, auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  for (auto [v, time] : acts) {
    t.members.push_back(v);
    t.times.push_back(time);
  }
  t.seed.assign(t.members.size(), 1);
  for (std::size_t i = 0; i < t.members.size(); ++i) {
    const NodeId u = t.members[i];
    for (NodeId v : g.in(u)) {
      auto tv = t.time_of(v);
      if (tv && *tv < t.times[i]) {
        t.edges.emplace_back(v, u);
        t.seed[i] = 0;
      }
    }
    for (NodeId w : g.out(u)) {
      if (!t.time_of(w)) t.boundary.push_back(w);
    }
  }
  std::sort(t.boundary.begin(), t.boundary.end());
  t.boundary.erase(std::unique(t.boundary.begin(), t.boundary.end()), t.boundary.end());
  return t;
}

std::vector<CascadeTrace> reconstruct_traces(const InfluenceGraph& g, std::span<const Rating> ratings) {
  std::map<std::string, std::vector<std::pair<NodeId, std::int64_t>>> by_product;
  for (const Rating& r : ratings) {
    auto v = g.find(r.user);
    if (!v) throw ParamError("ratings", "user '" + r.user + "' is not a node of the graph");
    by_product[r.product].emplace_back(*v, r.time);
  }
  std::vector<CascadeTrace> out;
  for (auto& [product, acts] : by_product) {
    CascadeTrace t = make_trace(g, product, std::move(acts));
    if (t.members.size() >= 2) out.push_back(std::move(t));
  }
  return out;
}

std::vector<Rating> ratings_from_records(std::span<const CascadeRecord> records) {
  std::vector<Rating> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& at = records[i].activation_time;
    for (std::size_t v = 0; v < at.size(); ++v) {
      if (at[v] >= 0) out.push_back({std::to_string(v), "c" + std::to_string(i), at[v]});
    }
  }
  return out;
}

const char* to_string(Aggregation a) noexcept { return a == Aggregation::Sum ? "sum" : "mean"; }

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "sum") return Aggregation::Sum;
  if (s == "mean") return Aggregation::Mean;
  throw ParamError("form", "expected sum|mean, got '" + s + "'");
}

double ThresholdModel::upper() const noexcept {
  return aggregation == Aggregation::Sum ? 0.1 : std::numeric_limits<double>::infinity();
}

void ThresholdModel::project() {
  const double hi = upper();
  for (double& x : influence) x = std::clamp(x, 0.0, hi);
  for (double& x : bias) x = std::clamp(x, 0.0, hi);
}

ThresholdModel ThresholdModel::zeros(const InfluenceGraph& g, Aggregation a) {
  ThresholdModel m;
  m.aggregation = a;
  m.influence.assign(g.edge_count(), 0.0);
  m.bias.assign(g.node_count(), 0.0);
  return m;
}

ThresholdModel ThresholdModel::init(const InfluenceGraph& g, Aggregation a, std::uint64_t seed) {
  ThresholdModel m = zeros(g, a);
  Rng rng(derive_seed(seed, "learner.init"));
  std::normal_distribution<double> gauss(0.05, 0.01);
  for (double& x : m.influence) x = gauss(rng);
  for (double& x : m.bias) x = gauss(rng);
  m.project();
  return m;
}

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double predict_activation(NodeId v, const std::vector<std::uint8_t>& active, const InfluenceGraph& g,
                          const ThresholdModel& m) {
  return sigmoid(activation_logit(v, g, m, [&](NodeId w) { return active[w] != 0; }));
}

namespace {

struct DenseSink {
  Gradient& g;
  void influence(std::size_t k, double x) { g.influence[k] += x; }
  void bias(NodeId v, double x) { g.bias[v] += x; }
};

struct SparseSink {
  std::vector<std::pair<std::size_t, double>> influence_terms;
  std::vector<std::pair<NodeId, double>> bias_terms;
  void influence(std::size_t k, double x) { influence_terms.emplace_back(k, x); }
  void bias(NodeId v, double x) { bias_terms.emplace_back(v, x); }
};

// Adds dL/dz for node v's logit into the sink.
template <class Sink, class ActiveFn>
void push_grad(Sink& sink, NodeId v, const InfluenceGraph& g, const ThresholdModel& m, double dz,
               ActiveFn&& active) {
  auto nb = g.in(v);
  const double scale = (m.aggregation == Aggregation::Mean && !nb.empty()) ? 1.0 / double(nb.size()) : 1.0;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    sink.influence(g.slot(v, k), (active(nb[k]) ? dz : -dz) * scale);
  }
  sink.bias(v, dz);
}

double safe_log(double p, bool& clamped) {
  if (p < kProbFloor) {
    clamped = true;
    p = kProbFloor;
  } else if (p > 1.0 - kProbFloor) {
    clamped = true;
    p = 1.0 - kProbFloor;
  }
  return std::log(p);
}

}  // namespace

namespace {

template <class Sink>
LossValue trace_nll_impl(const CascadeTrace& t, const InfluenceGraph& g, const ThresholdModel& m,
                         BoundaryWeighting weighting, Sink* sink) {
  LossValue out;
  for (std::size_t i = 0; i < t.members.size(); ++i) {
    const NodeId v = t.members[i];
    const std::int64_t tv = t.times[i];
    auto active = [&](NodeId w) {
      auto tw = t.time_of(w);
      return tw && *tw < tv;
    };
    const double p = sigmoid(activation_logit(v, g, m, active));
    out.loss -= safe_log(p, out.clamped);
    if (sink) push_grad(*sink, v, g, m, p - 1.0, active);
  }
  if (t.boundary.empty()) return out;
  const double w = weighting == BoundaryWeighting::Equal ? double(t.members.size()) / double(t.boundary.size()) : 1.0;
  auto member = [&](NodeId x) { return t.time_of(x).has_value(); };
  for (NodeId v : t.boundary) {
    const double p = sigmoid(activation_logit(v, g, m, member));
    out.loss -= w * safe_log(1.0 - p, out.clamped);
    if (sink) push_grad(*sink, v, g, m, w * p, member);
  }
  return out;
}

}  // namespace

LossValue trace_nll(const CascadeTrace& t, const InfluenceGraph& g, const ThresholdModel& m,
                    BoundaryWeighting weighting, Gradient* grad) {
  if (!grad) return trace_nll_impl<DenseSink>(t, g, m, weighting, nullptr);
  grad->influence.resize(m.influence.size(), 0.0);
  grad->bias.resize(m.bias.size(), 0.0);
  DenseSink sink{*grad};
  return trace_nll_impl(t, g, m, weighting, &sink);
}

std::vector<CascadeTrace> prefix_subcascades(const CascadeTrace& t, const InfluenceGraph& g) {
  std::vector<CascadeTrace> out;
  for (std::size_t i = 0; i + 1 < t.members.size(); ++i) {
    if (t.times[i] == t.times[i + 1]) continue;  // cut only between distinct times
    std::vector<std::pair<NodeId, std::int64_t>> acts;
    for (std::size_t j = 0; j <= i; ++j) acts.emplace_back(t.members[j], t.times[j]);
    out.push_back(make_trace(g, t.product + "#" + std::to_string(i + 1), std::move(acts)));
  }
  return out;
}

namespace {

struct Expanded {
  std::vector<CascadeTrace> owned;
  std::vector<const CascadeTrace*> all;
};

Expanded expand(std::span<const CascadeTrace> traces, const InfluenceGraph& g, bool augment) {
  Expanded e;
  if (augment) {
    for (const auto& t : traces) {
      auto p = prefix_subcascades(t, g);
      std::move(p.begin(), p.end(), std::back_inserter(e.owned));
    }
  }
  for (const auto& t : traces) e.all.push_back(&t);
  for (const auto& t : e.owned) e.all.push_back(&t);
  return e;
}

LossValue total_over(const std::vector<const CascadeTrace*>& traces, const InfluenceGraph& g,
                     const ThresholdModel& m, BoundaryWeighting w, Gradient* grad) {
  std::vector<LossValue> losses(traces.size());
  std::vector<SparseSink> sinks(grad ? traces.size() : 0);
  for_each_index(traces.size(), [&](std::size_t i) {
    losses[i] = trace_nll_impl(*traces[i], g, m, w, grad ? &sinks[i] : nullptr);
  });
  LossValue out;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    out.loss += losses[i].loss;
    out.clamped |= losses[i].clamped;
    if (grad) {
      for (auto [k, x] : sinks[i].influence_terms) grad->influence[k] += x;
      for (auto [v, x] : sinks[i].bias_terms) grad->bias[v] += x;
    }
  }
  return out;
}

}  // namespace

LossValue total_nll(std::span<const CascadeTrace> traces, const InfluenceGraph& g, const ThresholdModel& m,
                    const LossOptions& opt, Gradient* grad) {
  if (grad) {
    grad->influence.assign(m.influence.size(), 0.0);
    grad->bias.assign(m.bias.size(), 0.0);
  }
  Expanded e = expand(traces, g, opt.augment);
  return total_over(e.all, g, m, opt.weighting, grad);
}

FitResult fit(std::span<const CascadeTrace> traces, const InfluenceGraph& g, ThresholdModel init,
              const FitOptions& opt) {
  if (!(opt.lr > 0.0) || !std::isfinite(opt.lr)) throw ParamError("lr", "must be positive");
  if (init.influence.size() != g.edge_count() || init.bias.size() != g.node_count()) {
    throw ParamError("model", "parameter count does not match the graph");
  }
  FitResult res;
  res.model = std::move(init);
  res.final_lr = opt.lr;
  Expanded e = expand(traces, g, opt.loss.augment);

  Gradient grad{std::vector<double>(res.model.influence.size()), std::vector<double>(res.model.bias.size())};
  auto evaluate_at = [&](const ThresholdModel& m) {
    std::fill(grad.influence.begin(), grad.influence.end(), 0.0);
    std::fill(grad.bias.begin(), grad.bias.end(), 0.0);
    LossValue v = total_over(e.all, g, m, opt.loss.weighting, &grad);
    if (!std::isfinite(v.loss)) throw std::runtime_error("learner: non-finite loss");
    res.clamped |= v.clamped;
    return v.loss;
  };

  double loss = evaluate_at(res.model);
  res.loss.push_back(loss);
  std::size_t rising = 0;
  for (std::size_t it = 0; it < opt.steps; ++it) {
    for (std::size_t k = 0; k < grad.influence.size(); ++k) res.model.influence[k] -= res.final_lr * grad.influence[k];
    for (std::size_t k = 0; k < grad.bias.size(); ++k) res.model.bias[k] -= res.final_lr * grad.bias[k];
    res.model.project();
    const double next = evaluate_at(res.model);
    rising = next > loss ? rising + 1 : 0;
    loss = next;
    res.loss.push_back(loss);
    if (rising >= 10) {
      res.final_lr /= 2.0;
      ++res.lr_halvings;
      rising = 0;
      log::warn("learner: loss rose for 10 iterations, learning rate halved to " + std::to_string(res.final_lr));
    }
  }
  return res;
}

double EvalReport::majority_baseline() const {
  const auto all = pooled();
  if (all.total == 0) return 0.0;
  const double pos = double(active_nonseeds.total), neg = double(boundary.total);
  return std::max(pos, neg) / double(all.total);
}

EvalReport evaluate(std::span<const CascadeTrace> traces, const InfluenceGraph& g, const ThresholdModel& m) {
  EvalReport r;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.members.size(); ++i) {
      if (t.seed[i]) continue;
      const std::int64_t tv = t.times[i];
      double p = sigmoid(activation_logit(t.members[i], g, m, [&](NodeId w) {
        auto tw = t.time_of(w);
        return tw && *tw < tv;
      }));
      ++r.active_nonseeds.total;
      r.active_nonseeds.correct += p > 0.5;
    }
    for (NodeId v : t.boundary) {
      double p = sigmoid(activation_logit(v, g, m, [&](NodeId w) { return t.time_of(w).has_value(); }));
      ++r.boundary.total;
      r.boundary.correct += p <= 0.5;
    }
  }
  return r;
}

Split split_traces(std::size_t count, std::uint64_t seed, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ParamError("train-fraction", "must lie in (0,1]");
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, "learner.split"));
  for (std::size_t i = count; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  std::size_t n_train = std::size_t(std::llround(train_fraction * double(count)));
  if (count > 0) n_train = std::clamp<std::size_t>(n_train, 1, count);
  Split s;
  s.train.assign(idx.begin(), idx.begin() + long(n_train));
  s.test.assign(idx.begin() + long(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace contagion
