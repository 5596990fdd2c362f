#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"

namespace contagion {

// Directed influence graph. An edge w -> v means w can influence v (v trusts w);
// w is then an incoming neighbour of v and owns the parameter slot I_vw.
class InfluenceGraph {
 public:
  InfluenceGraph() = default;

  // trust pairs are (truster, trustee). Every label in `extra_nodes` gets a
  // node even without trust edges. Node order: first appearance.
  static InfluenceGraph from_trust(std::span<const std::pair<std::string, std::string>> trust,
                                   std::span<const std::string> extra_nodes = {});
  // Both directions of every undirected edge; labels are the decimal node ids.
  static InfluenceGraph from_graph(const RawGraph& g);

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return in_.size(); }
  const std::string& label(NodeId v) const { return labels_[v]; }
  std::optional<NodeId> find(const std::string& label) const;

  std::span<const NodeId> in(NodeId v) const {
    return {in_.data() + in_off_[v], in_off_[v + 1] - in_off_[v]};
  }
  std::span<const NodeId> out(NodeId v) const {
    return {out_.data() + out_off_[v], out_off_[v + 1] - out_off_[v]};
  }
  // Parameter slot of the k-th incoming edge of v.
  std::size_t slot(NodeId v, std::size_t k) const { return in_off_[v] + k; }
  std::size_t in_degree(NodeId v) const { return in_off_[v + 1] - in_off_[v]; }

 private:
  void build(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges);  // (from, to)

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::size_t> in_off_, out_off_;
  std::vector<NodeId> in_, out_;
};

struct Rating {
  std::string user;
  std::string product;
  std::int64_t time = 0;
};

struct CascadeTrace {
  std::string product;
  std::vector<NodeId> members;       // ordered by (time, node)
  std::vector<std::int64_t> times;   // aligned with members
  std::vector<std::pair<NodeId, NodeId>> edges;  // influencer -> influenced
  std::vector<NodeId> boundary;      // non-members with an incoming edge from a member, ascending
  std::vector<std::uint8_t> seed;    // aligned with members: no incoming influence edge

  // Activation time of v, or nullopt for non-members.
  std::optional<std::int64_t> time_of(NodeId v) const;

 private:
  friend CascadeTrace make_trace(const InfluenceGraph&, std::string, std::vector<std::pair<NodeId, std::int64_t>>);
  std::vector<std::pair<NodeId, std::int64_t>> by_node_;  // sorted by node
};

// Builds a trace from (node, time) pairs; duplicates keep the earliest time.
CascadeTrace make_trace(const InfluenceGraph& g, std::string product,
                        std::vector<std::pair<NodeId, std::int64_t>> activations);

// One trace per product with at least two raters, products in ascending
// order. Influence edge v -> u iff u trusts v and v rated strictly earlier.
// Ratings by users unknown to the graph throw ParamError("ratings").
std::vector<CascadeTrace> reconstruct_traces(const InfluenceGraph& g, std::span<const Rating> ratings);

// Ratings implied by simulated cascades: user = node id, product = "c<index>",
// time = activation step.
std::vector<Rating> ratings_from_records(std::span<const CascadeRecord> records);

enum class Aggregation { Sum, Mean };
const char* to_string(Aggregation a) noexcept;
Aggregation aggregation_from_string(const std::string& s);

struct ThresholdModel {
  Aggregation aggregation = Aggregation::Sum;
  std::vector<double> influence;  // I, one per InfluenceGraph slot
  std::vector<double> bias;       // b, one per node

  // 0.1 for the sum form, +inf for the mean form.
  double upper() const noexcept;
  // Clamp every parameter into [0, upper()].
  void project();
  // Gaussian(0.05, 0.01) clamped to the box.
  static ThresholdModel init(const InfluenceGraph& g, Aggregation a, std::uint64_t seed);
  static ThresholdModel zeros(const InfluenceGraph& g, Aggregation a);
};

double sigmoid(double z) noexcept;

// Logit of P(v | neighbours) where `active(w)` tells which incoming neighbours are active.
template <class ActiveFn>
double activation_logit(NodeId v, const InfluenceGraph& g, const ThresholdModel& m, ActiveFn&& active) {
  auto nb = g.in(v);
  double s = 0.0;
  for (std::size_t k = 0; k < nb.size(); ++k) {
    double i = m.influence[g.slot(v, k)];
    s += active(nb[k]) ? i : -i;
  }
  if (m.aggregation == Aggregation::Mean && !nb.empty()) s /= double(nb.size());
  return s + m.bias[v];
}

// P(v | active set) with an explicit active-set indicator over all nodes.
double predict_activation(NodeId v, const std::vector<std::uint8_t>& active, const InfluenceGraph& g,
                          const ThresholdModel& m);

enum class BoundaryWeighting { Equal, Raw };

struct LossOptions {
  BoundaryWeighting weighting = BoundaryWeighting::Equal;
  bool augment = false;  // add prefix-subcascade losses
};

struct Gradient {
  std::vector<double> influence;
  std::vector<double> bias;
};

struct LossValue {
  double loss = 0.0;
  bool clamped = false;  // some probability hit the [1e-12, 1 - 1e-12] clamp
};

// -sum_{v in C} log P(v) - w sum_{v in B} log(1 - P(v)). A member sees the
// members activated strictly before it as active; boundary nodes see every
// member as active. Equal weighting uses w = |C| / |B|.
LossValue trace_nll(const CascadeTrace& t, const InfluenceGraph& g, const ThresholdModel& m,
                    BoundaryWeighting weighting = BoundaryWeighting::Equal, Gradient* grad = nullptr);

// Prefix subcascades: members up to each activation time but the last.
std::vector<CascadeTrace> prefix_subcascades(const CascadeTrace& t, const InfluenceGraph& g);

// Sum of trace losses (plus prefix subcascades when augmenting). Per-trace
// gradients are reduced in trace order, so the result does not depend on threads.
LossValue total_nll(std::span<const CascadeTrace> traces, const InfluenceGraph& g, const ThresholdModel& m,
                    const LossOptions& opt = {}, Gradient* grad = nullptr);

struct FitOptions {
  std::size_t steps = 200;
  double lr = 0.01;
  LossOptions loss;
};

struct FitResult {
  ThresholdModel model;
  std::vector<double> loss;  // loss[0] at init, loss[i] after step i
  double final_lr = 0.0;
  std::size_t lr_halvings = 0;
  bool clamped = false;
};

// Projected gradient descent. Ten consecutive loss increases halve the
// learning rate; a non-finite loss throws std::runtime_error.
FitResult fit(std::span<const CascadeTrace> traces, const InfluenceGraph& g, ThresholdModel init,
              const FitOptions& opt);

struct Accuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::optional<double> value() const {
    return total ? std::optional<double>(double(correct) / double(total)) : std::nullopt;
  }
};

struct EvalReport {
  Accuracy active_nonseeds;  // predicted active (P > 0.5) given earlier members
  Accuracy boundary;         // predicted inactive (P <= 0.5) given all members
  Accuracy pooled() const {
    return {active_nonseeds.correct + boundary.correct, active_nonseeds.total + boundary.total};
  }
  // Accuracy of always predicting the more frequent pooled class.
  double majority_baseline() const;
};

EvalReport evaluate(std::span<const CascadeTrace> traces, const InfluenceGraph& g, const ThresholdModel& m);

// Trace indices split 80/20 by a seeded shuffle; both halves ascending.
struct Split {
  std::vector<std::size_t> train, test;
};
Split split_traces(std::size_t count, std::uint64_t seed, double train_fraction = 0.8);

template <class T>
std::vector<T> pick(std::span<const T> xs, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(xs[i]);
  return out;
}

}  // namespace contagion
