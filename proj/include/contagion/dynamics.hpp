#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "contagion/graph.hpp"
#include "contagion/rng.hpp"

namespace contagion {

// Unit-length direction of a propagating notion in feature space.
class Propagation {
 public:
  Propagation() = default;
  // Normalizes `v`; throws ParamError("propagation") on a zero or non-finite vector.
  explicit Propagation(std::vector<double> v);

  std::span<const double> vec() const noexcept { return vec_; }
  std::size_t dim() const noexcept { return vec_.size(); }
  bool operator==(const Propagation&) const = default;

 private:
  std::vector<double> vec_;
};

// How the local-influence term enters the activation probability.
//   Signed: LI in [-1, 1] exactly as it appears in the aggregated rule and
//           its matrix form; unexposed nodes contribute -beta.
//   Scaled: (1 + LI) / 2 in [0, 1], the calibrated form used by the
//           incubation analysis.
enum class LocalForm : std::uint8_t { Signed, Scaled };

const char* to_string(LocalForm f) noexcept;
LocalForm local_form_from_string(const std::string& s);

struct SimParams {
  double alpha = 1.0 / 3.0;   // propagation affinity weight
  double beta = 1.0 / 3.0;    // local influence weight
  double gamma = 0.05;        // temperature
  std::size_t epsilon = 10;   // cooling period in steps
  double lambda = 0.0;        // feature drift rate
  std::size_t max_steps = 0;  // 0 -> 10 n
  double viral_fraction = 0.5;
  LocalForm local_form = LocalForm::Signed;
  // Keep per-run live weights even when lambda == 0 (drift bookkeeping path).
  bool dynamic_weights = false;

  double global_weight() const noexcept { return 1.0 - alpha - beta; }
  std::size_t step_cap(std::size_t n) const noexcept { return max_steps ? max_steps : 10 * n; }
  // Throws ParamError naming the first invalid field.
  void validate() const;
  bool operator==(const SimParams&) const = default;
};

// Mutable per-run cascade state. Owns copies of features/weights only when
// drift is active; otherwise it reads the shared graph.
class CascadeState {
 public:
  CascadeState(const WeightedGraph& g, std::span<const NodeId> seeds, const SimParams& p);

  std::size_t node_count() const noexcept { return active_.size(); }
  bool is_active(NodeId v) const { return active_[v] != 0; }
  const std::vector<std::uint8_t>& active() const noexcept { return active_; }
  const std::vector<std::int32_t>& activation_time() const noexcept { return activation_time_; }
  std::size_t active_count() const noexcept { return active_count_; }
  std::size_t step_index() const noexcept { return step_; }
  std::size_t stable_steps() const noexcept { return stable_steps_; }

  // Sum of weights from v to currently active neighbours.
  double active_weight(NodeId v) const { return active_weight_[v]; }
  // Current weighted degree (changes only under drift).
  double degree(NodeId v) const { return live_degree_ ? (*live_degree_)[v] : g_->weighted_degree(v); }
  std::span<const double> neighbor_weights(NodeId v) const;
  std::span<const double> feature(NodeId v) const;
  bool drifting() const noexcept { return live_weights_.has_value(); }

  // Replace the activation vector wholesale (test/oracle use). Resets
  // activation times to 0 for active nodes and recomputes cached sums.
  void assign_active(const std::vector<std::uint8_t>& active);

 private:
  friend std::size_t step(CascadeState&, const Propagation&, const WeightedGraph&,
                          const SimParams&, Rng&);

  void activate(NodeId v, std::int32_t t);
  void apply_drift(NodeId v, const Propagation& c, double lambda);

  const WeightedGraph* g_;
  std::vector<std::uint8_t> active_;
  std::vector<std::int32_t> activation_time_;
  std::vector<double> active_weight_;
  std::size_t active_count_ = 0;
  std::size_t step_ = 0;
  std::size_t stable_steps_ = 0;
  std::optional<std::vector<double>> live_features_;
  std::optional<std::vector<double>> live_weights_;
  std::optional<std::vector<double>> live_degree_;
  // Affinity per node for the bound propagation vector.
  std::vector<double> affinity_;
  std::vector<double> bound_;
  std::vector<NodeId> scratch_;
};

struct CascadeRecord {
  std::string model = "up";
  SimParams params;
  std::vector<NodeId> seed_set;
  std::vector<double> propagation;
  std::uint64_t rng_seed = 0;
  std::vector<std::int32_t> activation_time;  // -1 = never
  std::vector<std::size_t> new_per_step;      // index 0 holds the seeds
  std::size_t final_spread = 0;
  std::size_t converged_at = 0;
  bool hit_cap = false;
  // Baseline-model parameters (empty for the UP model).
  std::vector<std::pair<std::string, double>> model_params;

  std::size_t node_count() const noexcept { return activation_time.size(); }
  bool operator==(const CascadeRecord&) const = default;
};

// (1 + c . x) / 2
double affinity(std::span<const double> c, std::span<const double> x) noexcept;

// Signed local influence in [-1, 1]; throws std::domain_error for d_v == 0.
double signed_local_influence(NodeId v, const CascadeState& s);
// Scaled local influence (1 + LI) / 2 in [0, 1].
double local_influence(NodeId v, const CascadeState& s);

// |S| / n
double global_influence(const CascadeState& s, std::size_t n) noexcept;

// clamp(gamma (alpha F + beta L + (1 - alpha - beta) GI), 0, 1), L per p.local_form.
double activation_prob(NodeId v, const CascadeState& s, const Propagation& c,
                       const WeightedGraph& g, const SimParams& p);

// One synchronous update. Every inactive node draws Bernoulli(prob) from the
// previous state; drift (lambda > 0) is applied to new adopters after all
// draws. Returns the number of new adopters.
std::size_t step(CascadeState& s, const Propagation& c, const WeightedGraph& g,
                 const SimParams& p, Rng& rng);

// Iterates `step` until no activation change for epsilon steps or the step cap.
CascadeRecord run_cascade(const WeightedGraph& g, const Propagation& c,
                          std::span<const NodeId> seeds, const SimParams& p,
                          std::uint64_t rng_seed);

// Same as run_cascade, continuing from an existing state.
CascadeRecord finish_cascade(CascadeState& s, const WeightedGraph& g, const Propagation& c,
                             std::span<const NodeId> seeds, const SimParams& p,
                             std::uint64_t rng_seed, Rng& rng);

// Activation probabilities via the matrix-vector form
//   gamma (alpha diag(F) 1 + beta L(D^-1 A (2Y - 1)) + (1 - alpha - beta) GI 1),
// computed from a fresh sparse mat-vec rather than cached sums.
std::vector<double> step_probs_matrix(const CascadeState& s, const Propagation& c,
                                      const WeightedGraph& g, const SimParams& p);

struct DriftResult {
  std::vector<double> feature;
  bool degenerate = false;  // (1 - lambda) x + lambda c == 0; x kept
};

// normalize((1 - lambda) x + lambda c). lambda == 0 returns x bit-for-bit.
DriftResult drift_update(std::span<const double> x, std::span<const double> c, double lambda);

// c x_seed + sqrt(1 - c^2) u, u a uniformly random unit vector orthogonal to x_seed.
Propagation misaligned_propagation(std::span<const double> seed_feature, double cosine, Rng& rng);

// Normalized feature (or feature sum for several seeds).
Propagation self_propagation(const WeightedGraph& g, std::span<const NodeId> seeds);

}  // namespace contagion
