#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "contagion/csv.hpp"
#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"

namespace contagion {

struct GraphSpec {
  std::size_t nodes = 1000;
  std::size_t attach = 2;
  std::size_t embed_dim = 10;
  std::uint64_t seed = 1;
};

struct NodeSelection {
  enum class Kind { All, Core, Intermediate, Periphery, Sample };
  Kind kind = Kind::All;
  std::size_t sample = 0;  // for Kind::Sample

  static NodeSelection parse(const std::string& s);  // all|core|intermediate|periphery|sample:m
  std::string str() const;
};

enum class SweepAxis { None, Alpha, Beta, Global, SeedAffinity, NetworkSize };
const char* to_string(SweepAxis a) noexcept;
SweepAxis sweep_axis_from_string(const std::string& s);

// How the two weights not on the sweep axis move.
//   Even:  they split the remaining mass equally.
//   Fixed: the non-global one keeps its configured value, global takes the rest.
enum class SweepCoupling { Even, Fixed };

struct ExperimentConfig {
  GraphSpec graph;
  SimParams params;
  std::size_t runs_per_node = 20;
  NodeSelection node_selection;
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;                   // sweep grid; empty -> default grid
  SweepCoupling coupling = SweepCoupling::Even;
  std::size_t runs_per_point = 2000;            // rq3-rq5
  std::vector<std::uint64_t> graph_seeds = {1, 2, 3, 4, 5};
  std::uint64_t master_seed = 1;
  std::size_t bins = 50;

  // Throws ParamError naming the offending field.
  void validate() const;
  // The grid actually swept: `values`, or 9 evenly spaced defaults for the axis.
  std::vector<double> grid() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& c);

// Weights at one sweep grid point.
SimParams swept_params(const ExperimentConfig& cfg, double value);

// Selected seed nodes in ascending id order; Sample draws without replacement.
std::vector<NodeId> select_nodes(const WeightedGraph& g, const NodeSelection& sel, std::uint64_t seed);

struct ResultSet {
  std::vector<std::pair<std::string, Table>> tables;      // file stem -> table
  std::vector<std::pair<std::string, std::string>> plots;  // file stem -> svg
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
};

// Writes <stem>.csv, <stem>.svg and summary.json; returns the written paths.
std::vector<std::filesystem::path> write_results(const ResultSet& r, const std::filesystem::path& dir);

struct Rq1Result {
  std::size_t runs = 0;
  double below_tenth = 0;     // fraction of runs with spread < 0.1 n
  double above_half = 0;      // fraction with spread > 0.5 n
  double middle_band = 0;     // fraction in [0.2 n, 0.8 n]
  double virality_frequency = 0;
  std::optional<double> spearman_degree_spread;
  ResultSet out;
};
Rq1Result rq1_spread_distribution(const ExperimentConfig& cfg);
Rq1Result rq1_spread_distribution(const ExperimentConfig& cfg, const WeightedGraph& g);

struct Rq2Result {
  std::size_t viral_runs = 0;
  std::size_t late_peak_runs = 0;  // viral runs whose tipping point is after step 1
  ResultSet out;
};
Rq2Result rq2_growth_curves(const ExperimentConfig& cfg);
Rq2Result rq2_growth_curves(const ExperimentConfig& cfg, const WeightedGraph& g);

struct Rq3Row {
  std::size_t nodes = 0;
  double mean_diameter = 0;
  std::size_t runs = 0;
  std::size_t viral_runs = 0;
  std::optional<double> mean_time;
};
struct Rq3Result {
  std::vector<Rq3Row> rows;
  ResultSet out;
};
Rq3Result rq3_size_scaling(const ExperimentConfig& cfg);

struct SweepRow {
  double value = 0;
  SimParams params;
  std::size_t runs = 0;
  std::size_t viral_runs = 0;
  double virality_frequency = 0;
  std::optional<double> mean_time;  // among viral runs
  double mean_spread = 0;
};
struct SweepResult {
  std::vector<SweepRow> rows;
  ResultSet out;
};
SweepResult rq4_param_sweep(const ExperimentConfig& cfg);
SweepResult rq5_affinity_sweep(const ExperimentConfig& cfg);

// Dispatch on rq number 1..5.
ResultSet run_experiment(int rq, const ExperimentConfig& cfg);

}  // namespace contagion
