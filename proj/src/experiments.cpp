#include "contagion/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "contagion/analytics.hpp"
#include "contagion/error.hpp"
#include "contagion/graph_io.hpp"
#include "contagion/kernels.hpp"
#include "contagion/log.hpp"
#include "contagion/record_io.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"
#include "contagion/svg.hpp"

namespace contagion {

using nlohmann::json;

NodeSelection NodeSelection::parse(const std::string& s) {
  NodeSelection sel;
  if (s == "all") return sel;
  if (s == "core") {
    sel.kind = Kind::Core;
  } else if (s == "intermediate") {
    sel.kind = Kind::Intermediate;
  } else if (s == "periphery") {
    sel.kind = Kind::Periphery;
  } else if (s.rfind("sample:", 0) == 0) {
    sel.kind = Kind::Sample;
    try {
      std::size_t used = 0;
      long long m = std::stoll(s.substr(7), &used);
      if (used != s.size() - 7 || m < 1) throw std::invalid_argument("");
      sel.sample = std::size_t(m);
    } catch (const std::exception&) {
      throw ParamError("node_selection", "sample size must be a positive integer in '" + s + "'");
    }
  } else {
    throw ParamError("node_selection", "expected all|core|intermediate|periphery|sample:m, got '" + s + "'");
  }
  return sel;
}

std::string NodeSelection::str() const {
  switch (kind) {
    case Kind::All: return "all";
    case Kind::Core: return "core";
    case Kind::Intermediate: return "intermediate";
    case Kind::Periphery: return "periphery";
    case Kind::Sample: return "sample:" + std::to_string(sample);
  }
  return "all";
}

const char* to_string(SweepAxis a) noexcept {
  switch (a) {
    case SweepAxis::None: return "none";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::Beta: return "beta";
    case SweepAxis::Global: return "global";
    case SweepAxis::SeedAffinity: return "seed_affinity";
    case SweepAxis::NetworkSize: return "network_size";
  }
  return "none";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  for (auto a : {SweepAxis::None, SweepAxis::Alpha, SweepAxis::Beta, SweepAxis::Global,
                 SweepAxis::SeedAffinity, SweepAxis::NetworkSize}) {
    if (s == to_string(a)) return a;
  }
  throw ParamError("sweep.axis", "unknown axis '" + s + "'");
}

std::vector<double> ExperimentConfig::grid() const {
  if (!values.empty()) return values;
  auto linspace = [](double lo, double hi) {
    std::vector<double> v(9);
    for (int i = 0; i < 9; ++i) v[i] = lo + (hi - lo) * i / 8.0;
    return v;
  };
  switch (axis) {
    case SweepAxis::Alpha:
    case SweepAxis::Beta:
    case SweepAxis::Global: return linspace(0.0, 1.0);
    case SweepAxis::SeedAffinity: return linspace(-1.0, 1.0);
    case SweepAxis::NetworkSize: return {250, 500, 1000, 2000, 4000};
    case SweepAxis::None: break;
  }
  return {};
}

SimParams swept_params(const ExperimentConfig& cfg, double v) {
  SimParams p = cfg.params;
  const bool even = cfg.coupling == SweepCoupling::Even;
  switch (cfg.axis) {
    case SweepAxis::Alpha:
      p.alpha = v;
      if (even) p.beta = (1.0 - v) / 2.0;
      break;
    case SweepAxis::Beta:
      p.beta = v;
      if (even) p.alpha = (1.0 - v) / 2.0;
      break;
    case SweepAxis::Global:
      if (even) {
        p.alpha = (1.0 - v) / 2.0;
        p.beta = (1.0 - v) / 2.0;
      } else {
        // Keep alpha, give beta whatever global leaves.
        p.beta = 1.0 - v - p.alpha;
      }
      break;
    default: break;
  }
  return p;
}

void ExperimentConfig::validate() const {
  if (graph.attach < 1) throw ParamError("graph.attach", "must be at least 1");
  if (graph.nodes <= graph.attach) throw ParamError("graph.nodes", "must exceed attach");
  if (graph.embed_dim < 1 || graph.embed_dim > graph.nodes) {
    throw ParamError("graph.embed_dim", "must lie in [1, nodes]");
  }
  params.validate();
  if (runs_per_node < 1) throw ParamError("runs_per_node", "must be at least 1");
  if (runs_per_point < 1) throw ParamError("runs_per_point", "must be at least 1");
  if (graph_seeds.empty()) throw ParamError("graph_seeds", "must not be empty");
  if (bins < 1) throw ParamError("bins", "must be at least 1");
  if (node_selection.kind == NodeSelection::Kind::Sample && node_selection.sample < 1) {
    throw ParamError("node_selection", "sample size must be at least 1");
  }
  for (double v : grid()) {
    if (!std::isfinite(v)) throw ParamError("sweep.values", "grid values must be finite");
    switch (axis) {
      case SweepAxis::Alpha:
      case SweepAxis::Beta:
      case SweepAxis::Global: {
        if (v < 0.0 || v > 1.0) throw ParamError("sweep.values", "weights must lie in [0,1]");
        SimParams p = swept_params(*this, v);
        if (p.alpha < -1e-12 || p.beta < -1e-12 || p.alpha + p.beta > 1.0 + 1e-12) {
          throw ParamError("sweep.values", "alpha + beta exceeds 1 at grid value " + fmt(v));
        }
        break;
      }
      case SweepAxis::SeedAffinity:
        if (v < -1.0 || v > 1.0) throw ParamError("sweep.values", "cosine must lie in [-1,1]");
        break;
      case SweepAxis::NetworkSize:
        if (v != std::floor(v) || v <= double(graph.attach) || v < double(graph.embed_dim)) {
          throw ParamError("sweep.values", "network sizes must be integers above attach and embed_dim");
        }
        break;
      case SweepAxis::None: break;
    }
  }
}

namespace {

template <class T>
T field(const json& j, const char* key, T fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParamError(path, std::string("wrong type: ") + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& prefix) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }) ==
        known.end()) {
      throw ParamError(prefix + it.key(), "unknown configuration key");
    }
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw ParamError("config", "expected a JSON object");
  reject_unknown(j,
                 {"graph", "params", "runs_per_node", "node_selection", "sweep", "runs_per_point",
                  "graph_seeds", "master_seed", "bins"},
                 "");
  ExperimentConfig c;
  if (j.contains("graph")) {
    const json& g = j["graph"];
    reject_unknown(g, {"nodes", "attach", "embed_dim", "seed"}, "graph.");
    c.graph.nodes = field(g, "nodes", c.graph.nodes, "graph.nodes");
    c.graph.attach = field(g, "attach", c.graph.attach, "graph.attach");
    c.graph.embed_dim = field(g, "embed_dim", c.graph.embed_dim, "graph.embed_dim");
    c.graph.seed = field(g, "seed", c.graph.seed, "graph.seed");
  }
  if (j.contains("params")) {
    reject_unknown(j["params"],
                   {"alpha", "beta", "gamma", "epsilon", "lambda", "max_steps", "viral_fraction",
                    "local_form", "dynamic_weights"},
                   "params.");
    try {
      c.params = params_from_json(j["params"], c.params);
    } catch (const json::exception& e) {
      throw ParamError("params", std::string("wrong type: ") + e.what());
    }
  }
  c.runs_per_node = field(j, "runs_per_node", c.runs_per_node, "runs_per_node");
  c.node_selection = NodeSelection::parse(field(j, "node_selection", std::string("all"), "node_selection"));
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    reject_unknown(s, {"axis", "values", "coupling"}, "sweep.");
    c.axis = sweep_axis_from_string(field(s, "axis", std::string("none"), "sweep.axis"));
    c.values = field(s, "values", c.values, "sweep.values");
    std::string coupling = field(s, "coupling", std::string("even"), "sweep.coupling");
    if (coupling == "even") {
      c.coupling = SweepCoupling::Even;
    } else if (coupling == "fixed") {
      c.coupling = SweepCoupling::Fixed;
    } else {
      throw ParamError("sweep.coupling", "expected even|fixed");
    }
  }
  c.runs_per_point = field(j, "runs_per_point", c.runs_per_point, "runs_per_point");
  c.graph_seeds = field(j, "graph_seeds", c.graph_seeds, "graph_seeds");
  c.master_seed = field(j, "master_seed", c.master_seed, "master_seed");
  c.bins = field(j, "bins", c.bins, "bins");
  c.validate();
  return c;
}

json experiment_config_to_json(const ExperimentConfig& c) {
  return json{{"graph",
               {{"nodes", c.graph.nodes},
                {"attach", c.graph.attach},
                {"embed_dim", c.graph.embed_dim},
                {"seed", c.graph.seed}}},
              {"params", params_to_json(c.params)},
              {"runs_per_node", c.runs_per_node},
              {"node_selection", c.node_selection.str()},
              {"sweep",
               {{"axis", to_string(c.axis)},
                {"values", c.grid()},
                {"coupling", c.coupling == SweepCoupling::Even ? "even" : "fixed"}}},
              {"runs_per_point", c.runs_per_point},
              {"graph_seeds", c.graph_seeds},
              {"master_seed", c.master_seed},
              {"bins", c.bins}};
}

std::vector<NodeId> select_nodes(const WeightedGraph& g, const NodeSelection& sel, std::uint64_t seed) {
  using K = NodeSelection::Kind;
  switch (sel.kind) {
    case K::Core: return g.nodes_in(Segment::Core);
    case K::Intermediate: return g.nodes_in(Segment::Intermediate);
    case K::Periphery: return g.nodes_in(Segment::Periphery);
    case K::All:
    case K::Sample: break;
  }
  std::vector<NodeId> all(g.node_count());
  std::iota(all.begin(), all.end(), NodeId{0});
  if (sel.kind == K::All || sel.sample >= all.size()) return all;
  // Partial Fisher-Yates.
  Rng rng(derive_seed(seed, "experiments.sample"));
  for (std::size_t i = 0; i < sel.sample; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(sel.sample);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::filesystem::path> write_results(const ResultSet& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [stem, table] : r.tables) {
    written.push_back(dir / (stem + ".csv"));
    write_text_file(written.back(), to_csv(table));
  }
  for (const auto& [stem, svg] : r.plots) {
    written.push_back(dir / (stem + ".svg"));
    write_text_file(written.back(), svg);
  }
  json summary = r.summary;
  summary["warnings"] = r.warnings;
  written.push_back(dir / "summary.json");
  write_text_file(written.back(), summary.dump(2) + "\n");
  return written;
}

namespace {

struct RunSummary {
  NodeId seed = 0;
  std::size_t spread = 0;
  bool viral = false;
  std::optional<std::size_t> time;  // time to virality
  std::optional<std::size_t> tipping;
  std::vector<std::size_t> new_per_step;
};

// Runs count cascades built by make(i); results ordered by i regardless of threading.
std::vector<RunSummary> simulate(const WeightedGraph& g, std::size_t count, const SimParams& p,
                                 const std::function<CascadeJob(std::size_t)>& make, bool keep_series) {
  std::vector<RunSummary> out(count);
  for_each_index(count, [&](std::size_t i) {
    CascadeJob job = make(i);
    CascadeRecord rec = run_cascade(g, job.propagation, job.seeds, p, job.rng_seed);
    RunSummary& s = out[i];
    s.seed = job.seeds.front();
    s.spread = rec.final_spread;
    s.viral = detect_virality(rec, p.viral_fraction);
    s.time = time_to_virality(rec, p.viral_fraction);
    s.tipping = tipping_point(rec);
    if (keep_series) s.new_per_step = std::move(rec.new_per_step);
  });
  return out;
}

CascadeJob self_job(const WeightedGraph& g, NodeId v, std::uint64_t rng_seed) {
  NodeId seeds[1] = {v};
  return CascadeJob{self_propagation(g, seeds), {v}, rng_seed};
}

std::string seg_name(const WeightedGraph& g, NodeId v) { return to_string(g.segment(v)); }

void warn(ResultSet& out, const std::string& msg) {
  log::warn(msg);
  out.warnings.push_back(msg);
}

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return mean(xs);
}

json opt_json(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

// Per-graph run allocation: total split as evenly as possible, earlier graphs first.
std::size_t share(std::size_t total, std::size_t parts, std::size_t i) {
  return total / parts + (i < total % parts ? 1 : 0);
}

}  // namespace

Rq1Result rq1_spread_distribution(const ExperimentConfig& cfg) {
  cfg.validate();
  WeightedGraph g = build_network(cfg.graph.nodes, cfg.graph.attach, cfg.graph.embed_dim, cfg.graph.seed);
  return rq1_spread_distribution(cfg, g);
}

Rq1Result rq1_spread_distribution(const ExperimentConfig& cfg, const WeightedGraph& g) {
  cfg.params.validate();
  const std::size_t n = g.node_count();
  const auto nodes = select_nodes(g, cfg.node_selection, cfg.master_seed);
  const std::size_t per = cfg.runs_per_node;
  auto runs = simulate(
      g, nodes.size() * per, cfg.params,
      [&](std::size_t i) {
        NodeId v = nodes[i / per];
        return self_job(g, v, derive_seed(cfg.master_seed, "rq1.run", std::uint64_t(v) * per + i % per));
      },
      false);

  Rq1Result res;
  res.runs = runs.size();
  Table per_run{{"seed", "segment", "degree", "run", "spread", "viral"}, {}};
  Table per_node{{"seed", "segment", "degree", "mean_spread", "runs", "viral_runs"}, {}};
  std::vector<double> spreads, degrees, means;
  std::size_t below = 0, above = 0, middle = 0, viral = 0;
  const double nd = double(n);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const NodeId v = nodes[k];
    double sum = 0;
    std::size_t node_viral = 0;
    for (std::size_t r = 0; r < per; ++r) {
      const RunSummary& s = runs[k * per + r];
      const double sp = double(s.spread);
      spreads.push_back(sp);
      sum += sp;
      below += sp < 0.1 * nd;
      above += sp > 0.5 * nd;
      middle += sp >= 0.2 * nd && sp <= 0.8 * nd;
      viral += s.viral;
      node_viral += s.viral;
      per_run.add_row({fmt(std::size_t(v)), seg_name(g, v), fmt(g.raw().degree(v)), fmt(r),
                       fmt(s.spread), s.viral ? "1" : "0"});
    }
    degrees.push_back(double(g.raw().degree(v)));
    means.push_back(sum / double(per));
    per_node.add_row({fmt(std::size_t(v)), seg_name(g, v), fmt(g.raw().degree(v)), fmt(means.back()),
                      fmt(per), fmt(node_viral)});
  }
  const double total = double(std::max<std::size_t>(1, runs.size()));
  res.below_tenth = double(below) / total;
  res.above_half = double(above) / total;
  res.middle_band = double(middle) / total;
  res.virality_frequency = double(viral) / total;
  try {
    res.spearman_degree_spread = spearman(degrees, means);
  } catch (const std::exception& e) {
    warn(res.out, std::string("spearman(degree, mean spread) undefined: ") + e.what());
  }

  Histogram h = histogram(spreads, cfg.bins, std::make_pair(0.0, nd));
  Table hist{{"bin_lo", "bin_hi", "count"}, {}};
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    hist.add_row({fmt(h.edges[b]), fmt(h.edges[b + 1]), fmt(h.counts[b])});
  }

  res.out.summary = json{{"experiment", "rq1"},
                         {"runs", res.runs},
                         {"nodes", n},
                         {"fraction_below_0.1n", res.below_tenth},
                         {"fraction_above_0.5n", res.above_half},
                         {"fraction_middle_band", res.middle_band},
                         {"virality_frequency", res.virality_frequency},
                         {"spearman_degree_mean_spread", opt_json(res.spearman_degree_spread)}};
  res.out.plots.emplace_back("rq1_histogram",
                             svg_histogram({"Final cascade size", "spread", "runs"}, h));
  Series scatter{"seed nodes", degrees, means};
  res.out.plots.emplace_back(
      "rq1_degree",
      svg_line_plot({"Seed degree vs mean spread", "degree", "mean spread"}, {&scatter, 1}, LineStyle::Points));
  res.out.tables.emplace_back("rq1_runs", std::move(per_run));
  res.out.tables.emplace_back("rq1_nodes", std::move(per_node));
  res.out.tables.emplace_back("rq1_histogram", std::move(hist));
  return res;
}

Rq2Result rq2_growth_curves(const ExperimentConfig& cfg) {
  cfg.validate();
  WeightedGraph g = build_network(cfg.graph.nodes, cfg.graph.attach, cfg.graph.embed_dim, cfg.graph.seed);
  return rq2_growth_curves(cfg, g);
}

Rq2Result rq2_growth_curves(const ExperimentConfig& cfg, const WeightedGraph& g) {
  cfg.params.validate();
  Rq2Result res;
  using K = NodeSelection::Kind;
  std::vector<Segment> segments;
  switch (cfg.node_selection.kind) {
    case K::Core: segments = {Segment::Core}; break;
    case K::Intermediate: segments = {Segment::Intermediate}; break;
    case K::Periphery: segments = {Segment::Periphery}; break;
    default: segments = {Segment::Core, Segment::Intermediate, Segment::Periphery};
  }

  Table series{{"segment", "seed", "run", "step", "new", "cumulative"}, {}};
  Table tipping{{"segment", "seed", "run", "tipping_point", "time_to_virality", "final_spread"}, {}};
  Table mean_curves{{"segment", "step", "viral_runs", "mean_new", "mean_cumulative"}, {}};
  std::vector<Series> cum_plot, new_plot;
  json per_segment = json::object();

  for (Segment seg : segments) {
    std::vector<NodeId> seeds = g.nodes_in(seg);
    if (cfg.node_selection.kind == K::Sample && cfg.node_selection.sample < seeds.size()) {
      Rng rng(derive_seed(cfg.master_seed, "rq2.sample", std::uint64_t(seg)));
      std::shuffle(seeds.begin(), seeds.end(), rng);
      seeds.resize(cfg.node_selection.sample);
      std::sort(seeds.begin(), seeds.end());
    }
    const std::size_t per = cfg.runs_per_node;
    auto runs = simulate(
        g, seeds.size() * per, cfg.params,
        [&](std::size_t i) {
          NodeId v = seeds[i / per];
          return self_job(g, v, derive_seed(cfg.master_seed, "rq2.run", std::uint64_t(v) * per + i % per));
        },
        true);

    std::size_t viral = 0, late = 0, longest = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const RunSummary& s = runs[i];
      if (!s.viral) continue;
      ++viral;
      if (s.tipping && *s.tipping > 1) ++late;
      longest = std::max(longest, s.new_per_step.size());
      const std::string run_id = fmt(i % per);
      std::size_t cum = 0;
      for (std::size_t t = 0; t < s.new_per_step.size(); ++t) {
        cum += s.new_per_step[t];
        series.add_row({to_string(seg), fmt(std::size_t(s.seed)), run_id, fmt(t), fmt(s.new_per_step[t]),
                        fmt(cum)});
      }
      tipping.add_row({to_string(seg), fmt(std::size_t(s.seed)), run_id,
                       s.tipping ? fmt(*s.tipping) : std::string(), s.time ? fmt(*s.time) : std::string(),
                       fmt(s.spread)});
    }
    res.viral_runs += viral;
    res.late_peak_runs += late;
    per_segment[to_string(seg)] = json{{"runs", runs.size()}, {"viral_runs", viral}, {"late_peak_runs", late}};
    if (viral == 0) {
      warn(res.out, std::string("no viral runs from ") + to_string(seg) + " seeds");
      continue;
    }

    // Mean curves: finished runs hold their final cumulative value.
    Series cum{to_string(seg), {}, {}}, fresh{to_string(seg), {}, {}};
    for (std::size_t t = 0; t < longest; ++t) {
      double sum_new = 0, sum_cum = 0;
      for (const RunSummary& s : runs) {
        if (!s.viral) continue;
        std::size_t upto = std::min(t + 1, s.new_per_step.size());
        std::size_t c = std::accumulate(s.new_per_step.begin(), s.new_per_step.begin() + long(upto), std::size_t{0});
        sum_cum += double(c);
        if (t < s.new_per_step.size()) sum_new += double(s.new_per_step[t]);
      }
      const double mn = sum_new / double(viral), mc = sum_cum / double(viral);
      mean_curves.add_row({to_string(seg), fmt(t), fmt(viral), fmt(mn), fmt(mc)});
      cum.x.push_back(double(t));
      cum.y.push_back(mc);
      fresh.x.push_back(double(t));
      fresh.y.push_back(mn);
    }
    cum_plot.push_back(std::move(cum));
    new_plot.push_back(std::move(fresh));
  }

  res.out.summary = json{{"experiment", "rq2"},
                         {"viral_runs", res.viral_runs},
                         {"late_peak_runs", res.late_peak_runs},
                         {"late_peak_fraction",
                          res.viral_runs ? json(double(res.late_peak_runs) / double(res.viral_runs)) : json(nullptr)},
                         {"segments", per_segment}};
  res.out.plots.emplace_back("rq2_cumulative",
                             svg_line_plot({"Cumulative adopters (viral runs)", "step", "adopters"}, cum_plot));
  res.out.plots.emplace_back("rq2_new",
                             svg_line_plot({"New adopters per step (viral runs)", "step", "new adopters"}, new_plot));
  res.out.tables.emplace_back("rq2_series", std::move(series));
  res.out.tables.emplace_back("rq2_tipping", std::move(tipping));
  res.out.tables.emplace_back("rq2_mean", std::move(mean_curves));
  return res;
}

Rq3Result rq3_size_scaling(const ExperimentConfig& in) {
  ExperimentConfig cfg = in;
  if (cfg.axis == SweepAxis::None) cfg.axis = SweepAxis::NetworkSize;
  if (cfg.axis != SweepAxis::NetworkSize) throw ParamError("sweep.axis", "rq3 sweeps network_size");
  cfg.validate();

  Rq3Result res;
  Table graphs{{"nodes", "graph_seed", "diameter", "runs", "viral_runs", "mean_time_to_virality"}, {}};
  Table scaling{{"nodes", "graphs", "mean_diameter", "runs", "viral_runs", "virality_frequency",
                 "mean_time_to_virality", "sd_time_across_graphs"},
                {}};
  const std::size_t G = cfg.graph_seeds.size();
  std::uint64_t run_base = 0;
  for (double size : cfg.grid()) {
    const auto n = std::size_t(size);
    Rq3Row row;
    row.nodes = n;
    std::vector<double> times, graph_means;
    double diam_sum = 0;
    for (std::size_t gi = 0; gi < G; ++gi) {
      WeightedGraph g = build_network(n, cfg.graph.attach, cfg.graph.embed_dim, cfg.graph_seeds[gi]);
      const std::size_t diam = diameter(g.raw());
      diam_sum += double(diam);
      const auto core = g.nodes_in(Segment::Core);
      const std::size_t count = share(cfg.runs_per_point, G, gi);
      auto runs = simulate(
          g, count, cfg.params,
          [&](std::size_t i) {
            return self_job(g, core[i % core.size()], derive_seed(cfg.master_seed, "rq3.run", run_base + i));
          },
          false);
      run_base += count;
      std::vector<double> local;
      for (const RunSummary& s : runs) {
        if (s.time) local.push_back(double(*s.time));
      }
      times.insert(times.end(), local.begin(), local.end());
      auto lm = mean_of(local);
      if (lm) graph_means.push_back(*lm);
      graphs.add_row({fmt(n), fmt(std::size_t(cfg.graph_seeds[gi])), fmt(diam), fmt(count), fmt(local.size()),
                      fmt(lm)});
      row.runs += count;
      row.viral_runs += local.size();
    }
    row.mean_diameter = diam_sum / double(G);
    row.mean_time = mean_of(times);
    if (!row.mean_time) warn(res.out, "no viral runs at n=" + std::to_string(n));
    std::optional<double> sd;
    if (graph_means.size() >= 2) sd = standard_error(graph_means) * std::sqrt(double(graph_means.size()));
    scaling.add_row({fmt(n), fmt(G), fmt(row.mean_diameter), fmt(row.runs), fmt(row.viral_runs),
                     fmt(double(row.viral_runs) / double(row.runs)), fmt(row.mean_time), fmt(sd)});
    res.rows.push_back(row);
  }

  std::vector<double> xs, ts, ds;
  for (const auto& r : res.rows) {
    if (!r.mean_time) continue;
    xs.push_back(double(r.nodes));
    ts.push_back(*r.mean_time);
    ds.push_back(r.mean_diameter);
  }
  json summary{{"experiment", "rq3"}, {"sizes", res.rows.size()}};
  if (ts.size() >= 2) summary["time_ratio_largest_smallest"] = ts.back() / ts.front();
  if (ts.size() >= 3) {
    try {
      summary["spearman_time_diameter"] = spearman(ts, ds);
    } catch (const std::exception& e) {
      warn(res.out, std::string("spearman(time, diameter) undefined: ") + e.what());
    }
  }
  res.out.summary = summary;
  std::vector<Series> plot{{"mean time to virality", xs, ts}, {"mean diameter", xs, ds}};
  res.out.plots.emplace_back("rq3_scaling", svg_line_plot({"Time to virality and diameter", "nodes", "steps / hops"}, plot));
  res.out.tables.emplace_back("rq3_graphs", std::move(graphs));
  res.out.tables.emplace_back("rq3_scaling", std::move(scaling));
  return res;
}

namespace {

struct GraphPool {
  std::vector<WeightedGraph> graphs;
  std::vector<std::vector<NodeId>> seeds;
};

GraphPool build_pool(const ExperimentConfig& cfg) {
  GraphPool pool;
  for (std::uint64_t s : cfg.graph_seeds) {
    pool.graphs.push_back(build_network(cfg.graph.nodes, cfg.graph.attach, cfg.graph.embed_dim, s));
    pool.seeds.push_back(select_nodes(pool.graphs.back(), cfg.node_selection, cfg.master_seed ^ s));
  }
  return pool;
}

// One grid point. Run j of graph gi uses the same seed node and rng stream at
// every grid value, so grid points are compared on paired runs.
SweepRow sweep_point(const ExperimentConfig& cfg, const GraphPool& pool, double value, const SimParams& p,
                     const char* label,
                     const std::function<Propagation(const WeightedGraph&, NodeId, std::uint64_t)>& prop) {
  SweepRow row;
  row.value = value;
  row.params = p;
  std::vector<double> times;
  double spread_sum = 0;
  std::uint64_t base = 0;
  const std::size_t G = pool.graphs.size();
  for (std::size_t gi = 0; gi < G; ++gi) {
    const WeightedGraph& g = pool.graphs[gi];
    const auto& seeds = pool.seeds[gi];
    const std::size_t count = share(cfg.runs_per_point, G, gi);
    auto runs = simulate(
        g, count, p,
        [&](std::size_t i) {
          NodeId v = seeds[i % seeds.size()];
          const std::uint64_t idx = base + i;
          return CascadeJob{prop(g, v, idx), {v}, derive_seed(cfg.master_seed, label, idx)};
        },
        false);
    base += count;
    for (const RunSummary& s : runs) {
      ++row.runs;
      row.viral_runs += s.viral;
      spread_sum += double(s.spread);
      if (s.time) times.push_back(double(*s.time));
    }
  }
  row.virality_frequency = double(row.viral_runs) / double(row.runs);
  row.mean_time = mean_of(times);
  row.mean_spread = spread_sum / double(row.runs);
  return row;
}

SweepResult finish_sweep(std::vector<SweepRow> rows, const char* name, const char* axis_label) {
  SweepResult res;
  Table t{{"value", "alpha", "beta", "global", "runs", "viral_runs", "virality_frequency",
           "mean_time_to_virality", "mean_spread"},
          {}};
  Series freq{"virality frequency", {}, {}}, time{"mean time to virality", {}, {}};
  std::vector<double> xs, fs, ts_x, ts;
  for (const auto& r : rows) {
    t.add_row({fmt(r.value), fmt(r.params.alpha), fmt(r.params.beta), fmt(r.params.global_weight()), fmt(r.runs),
               fmt(r.viral_runs), fmt(r.virality_frequency), fmt(r.mean_time), fmt(r.mean_spread)});
    freq.x.push_back(r.value);
    freq.y.push_back(r.virality_frequency);
    time.x.push_back(r.value);
    time.y.push_back(r.mean_time ? *r.mean_time : std::nan(""));
    xs.push_back(r.value);
    fs.push_back(r.virality_frequency);
    if (r.mean_time) {
      ts_x.push_back(r.value);
      ts.push_back(*r.mean_time);
    }
  }
  json summary{{"experiment", name}, {"grid_points", rows.size()}};
  auto tau = [&](const char* key, const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2) return;
    try {
      summary[key] = kendall_tau(a, b);
    } catch (const std::exception& e) {
      res.out.warnings.push_back(std::string(key) + " undefined: " + e.what());
    }
  };
  tau("kendall_tau_frequency", xs, fs);
  tau("kendall_tau_time", ts_x, ts);
  for (const auto& r : rows) {
    if (!r.mean_time) res.out.warnings.push_back("no viral runs at grid value " + fmt(r.value));
  }
  for (const auto& w : res.out.warnings) log::warn(w);
  res.out.summary = summary;
  std::string stem(name);
  res.out.plots.emplace_back(stem + "_frequency",
                             svg_line_plot({"Virality frequency", axis_label, "fraction of runs"}, {&freq, 1}));
  res.out.plots.emplace_back(stem + "_time",
                             svg_line_plot({"Mean time to virality", axis_label, "steps"}, {&time, 1}));
  res.out.tables.emplace_back(stem + "_sweep", std::move(t));
  res.rows = std::move(rows);
  return res;
}

}  // namespace

SweepResult rq4_param_sweep(const ExperimentConfig& cfg) {
  if (cfg.axis != SweepAxis::Alpha && cfg.axis != SweepAxis::Beta && cfg.axis != SweepAxis::Global) {
    throw ParamError("sweep.axis", "rq4 sweeps alpha, beta or global");
  }
  cfg.validate();
  GraphPool pool = build_pool(cfg);
  std::vector<SweepRow> rows;
  for (double v : cfg.grid()) {
    SimParams p = swept_params(cfg, v);
    rows.push_back(sweep_point(cfg, pool, v, p, "rq4.run", [](const WeightedGraph& g, NodeId s, std::uint64_t) {
      NodeId one[1] = {s};
      return self_propagation(g, one);
    }));
  }
  return finish_sweep(std::move(rows), "rq4", to_string(cfg.axis));
}

SweepResult rq5_affinity_sweep(const ExperimentConfig& in) {
  ExperimentConfig cfg = in;
  if (cfg.axis == SweepAxis::None) cfg.axis = SweepAxis::SeedAffinity;
  if (cfg.axis != SweepAxis::SeedAffinity) throw ParamError("sweep.axis", "rq5 sweeps seed_affinity");
  cfg.validate();
  GraphPool pool = build_pool(cfg);
  std::vector<SweepRow> rows;
  for (double c : cfg.grid()) {
    rows.push_back(sweep_point(cfg, pool, c, cfg.params, "rq5.run",
                               [&](const WeightedGraph& g, NodeId s, std::uint64_t idx) {
                                 Rng rng(derive_seed(cfg.master_seed, "rq5.direction", idx));
                                 return misaligned_propagation(g.features().row(s), c, rng);
                               }));
  }
  return finish_sweep(std::move(rows), "rq5", "cosine to seed feature");
}

ResultSet run_experiment(int rq, const ExperimentConfig& cfg) {
  switch (rq) {
    case 1: return rq1_spread_distribution(cfg).out;
    case 2: return rq2_growth_curves(cfg).out;
    case 3: return rq3_size_scaling(cfg).out;
    case 4: return rq4_param_sweep(cfg).out;
    case 5: return rq5_affinity_sweep(cfg).out;
    default: throw ParamError("rq", "must be 1..5");
  }
}

}  // namespace contagion
