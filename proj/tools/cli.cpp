#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "contagion/analytics.hpp"
#include "contagion/baselines.hpp"
#include "contagion/csv.hpp"
#include "contagion/error.hpp"
#include "contagion/experiments.hpp"
#include "contagion/graph_io.hpp"
#include "contagion/kernels.hpp"
#include "contagion/learner.hpp"
#include "contagion/learner_io.hpp"
#include "contagion/log.hpp"
#include "contagion/optimizer.hpp"
#include "contagion/record_io.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"
#include "contagion/svg.hpp"

namespace contagion::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands = {"netgen",     "simulate", "baseline", "analyze", "experiment",
                                            "learn",      "learn-eval", "optimize", "plot"};

std::string usage() {
  return "usage: contagion <command> [options]\n"
         "\n"
         "commands:\n"
         "  netgen      generate a preferential-attachment network with spectral features\n"
         "  simulate    run UP-model cascades\n"
         "  baseline    run IC, LT or k-complex cascades\n"
         "  analyze     summarize a runs file\n"
         "  experiment  run a batch experiment (rq 1-5) into a results directory\n"
         "  learn       fit a threshold model to cascade traces\n"
         "  learn-eval  score a fitted threshold model\n"
         "  optimize    search for a propagation vector maximizing spread\n"
         "  plot        render a CSV table as an SVG plot\n"
         "\n"
         "Every command accepts --config file.json (flags win) and --jobs N.\n"
         "Run 'contagion <command> --help' for its options.\n";
}

fs::path dir_of(const fs::path& file) {
  auto d = file.parent_path();
  return d.empty() ? fs::path(".") : d;
}

std::vector<NodeId> parse_node_list(const std::string& text, const std::string& field) {
  std::vector<NodeId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0 || v > 0xffffffffLL) throw std::invalid_argument("");
      out.push_back(NodeId(v));
    } catch (const std::exception&) {
      throw ParamError(field, "expected comma-separated node ids, got '" + item + "'");
    }
  }
  if (out.empty()) throw ParamError(field, "must name at least one node");
  return out;
}

std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// The option values CLI11 resolved, numbers kept as numbers.
json resolved_options(const CLI::App& sub) {
  json j = json::object();
  for (const CLI::Option* o : sub.get_options()) {
    if (o->get_lnames().empty() || o->get_lnames().front() == "help") continue;
    const std::string name = o->get_lnames().front();
    std::string text;
    if (o->count() > 0) {
      auto r = o->results();
      for (std::size_t i = 0; i < r.size(); ++i) text += (i ? "," : "") + r[i];
      if (o->get_type_size() == 0 && r.size() <= 1) text = "true";
    } else {
      text = o->get_default_str();
      if (o->get_type_size() == 0) text = "false";
    }
    if (text.empty()) continue;
    json v = json::parse(text, nullptr, false);
    j[name] = (v.is_discarded() || v.is_object() || v.is_array() || v.is_string()) ? json(text) : v;
  }
  return j;
}

struct SimFlags {
  SimParams p;
  std::string local_form = "signed";

  void add(CLI::App* sc) {
    sc->add_option("--alpha", p.alpha, "propagation affinity weight")->capture_default_str();
    sc->add_option("--beta", p.beta, "local influence weight")->capture_default_str();
    sc->add_option("--gamma", p.gamma, "temperature")->capture_default_str();
    sc->add_option("--epsilon", p.epsilon, "cooling period in steps")->capture_default_str();
    sc->add_option("--lambda", p.lambda, "feature drift rate")->capture_default_str();
    sc->add_option("--max-steps", p.max_steps, "step cap (0 = 10 n)")->capture_default_str();
    sc->add_option("--viral-fraction", p.viral_fraction, "virality threshold as a fraction of n")
        ->capture_default_str();
    sc->add_option("--local-form", local_form, "signed|scaled")->capture_default_str();
  }

  SimParams resolve() {
    p.local_form = local_form_from_string(local_form);
    p.validate();
    return p;
  }
};

struct Context;
void record_params(Context& ctx, const SimParams& p);

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string config;  // --config path, empty when absent
  RunManifest manifest;
  fs::path manifest_dir;
};

using Action = std::function<void(Context&)>;

// CLI11 renders defaults at six digits; the manifest keeps the exact values.
void record_params(Context& ctx, const SimParams& p) {
  for (const char* k : {"alpha", "beta", "gamma", "epsilon", "lambda", "max-steps", "viral-fraction", "local-form"}) {
    ctx.manifest.config.erase(k);
  }
  ctx.manifest.config["params"] = params_to_json(p);
}

Action netgen(CLI::App* sc) {
  struct O {
    std::size_t nodes = 1000, attach = 2, embed_dim = 10;
    std::uint64_t seed = 1;
    std::string out;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--nodes", o->nodes, "number of nodes")->capture_default_str();
  sc->add_option("--attach", o->attach, "edges per arrival (r)")->capture_default_str();
  sc->add_option("--embed-dim", o->embed_dim, "spectral feature dimension (k)")->capture_default_str();
  sc->add_option("--seed", o->seed, "master seed")->capture_default_str();
  sc->add_option("--out", o->out, "graph JSON path")->required();
  return [o](Context& ctx) {
    if (o->attach < 1) throw ParamError("attach", "must be at least 1");
    if (o->nodes <= o->attach) throw ParamError("nodes", "must exceed attach (n > r)");
    if (o->embed_dim < 1 || o->embed_dim > o->nodes) throw ParamError("embed-dim", "must lie in [1, nodes]");
    WeightedGraph g = build_network(o->nodes, o->attach, o->embed_dim, o->seed);
    for (const auto& w : g.features().warnings) log::warn(w);
    save_graph(o->out, g, o->attach, o->seed);
    ctx.manifest.seed = o->seed;
    ctx.manifest.outputs = {o->out};
    ctx.manifest_dir = dir_of(o->out);
  };
}

Propagation resolve_propagation(const std::string& spec, const WeightedGraph& g, std::span<const NodeId> seeds,
                                std::vector<fs::path>& inputs) {
  if (spec == "self") return self_propagation(g, seeds);
  if (spec.rfind("affinity:", 0) == 0) throw std::logic_error("affinity handled per run");
  inputs.push_back(spec);
  json j = read_json_file(spec);
  const json& v = j.is_object() ? j.at("vector") : j;
  try {
    Propagation c(v.get<std::vector<double>>());
    if (c.dim() != g.dim()) throw ParamError("prop", "vector dimension does not match the graph features");
    return c;
  } catch (const json::exception& e) {
    throw ParamError("prop", std::string("vector file must hold a number array: ") + e.what());
  }
}

double parse_cosine(const std::string& spec) {
  try {
    std::size_t used = 0;
    const std::string text = spec.substr(9);
    double c = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("");
    return c;
  } catch (const std::exception&) {
    throw ParamError("prop", "expected affinity:<cosine>, got '" + spec + "'");
  }
}

Action simulate(CLI::App* sc) {
  struct O {
    std::string graph, seeds, prop = "self", out;
    std::size_t runs = 1;
    std::uint64_t seed = 1;
    SimFlags sim;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--graph", o->graph, "graph JSON")->required();
  o->sim.add(sc);
  sc->add_option("--seeds", o->seeds, "comma-separated seed nodes")->required();
  sc->add_option("--prop", o->prop, "self | affinity:<cosine> | vector JSON file")->capture_default_str();
  sc->add_option("--runs", o->runs, "number of cascades")->capture_default_str();
  sc->add_option("--seed", o->seed, "master seed")->capture_default_str();
  sc->add_option("--out", o->out, "runs JSON-lines path")->required();
  return [o](Context& ctx) {
    SimParams p = o->sim.resolve();
    record_params(ctx, p);
    if (o->runs < 1) throw ParamError("runs", "must be at least 1");
    auto doc = load_graph(o->graph);
    const WeightedGraph& g = doc.graph;
    auto seeds = parse_node_list(o->seeds, "seeds");
    for (NodeId s : seeds) {
      if (s >= g.node_count()) throw ParamError("seeds", "node id " + std::to_string(s) + " out of range");
    }
    ctx.manifest.inputs.push_back(o->graph);
    std::vector<CascadeJob> jobs(o->runs);
    if (o->prop.rfind("affinity:", 0) == 0) {
      double cosine = parse_cosine(o->prop);
      Propagation self = self_propagation(g, seeds);
      for (std::size_t i = 0; i < o->runs; ++i) {
        Rng rng(derive_seed(o->seed, "simulate.direction", i));
        jobs[i].propagation = misaligned_propagation(self.vec(), cosine, rng);
      }
    } else {
      Propagation c = resolve_propagation(o->prop, g, seeds, ctx.manifest.inputs);
      for (auto& j : jobs) j.propagation = c;
    }
    for (std::size_t i = 0; i < o->runs; ++i) {
      jobs[i].seeds = seeds;
      jobs[i].rng_seed = derive_seed(o->seed, "simulate", i);
    }
    auto recs = run_batch(g, jobs, p);
    write_text_file(o->out, records_to_jsonl(recs));
    ctx.manifest.seed = o->seed;
    ctx.manifest.outputs = {o->out};
    ctx.manifest_dir = dir_of(o->out);
  };
}

Action baseline(CLI::App* sc) {
  struct O {
    std::string model = "ic", graph, seeds, out;
    std::optional<double> p, theta;
    std::size_t k = 2, runs = 1;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--model", o->model, "ic|lt|kcomplex")->capture_default_str();
  sc->add_option("--graph", o->graph, "graph JSON")->required();
  sc->add_option("--p", o->p, "IC activation probability (default 0.1)");
  sc->add_option("--theta", o->theta, "constant LT threshold (default: uniform thresholds)");
  sc->add_option("--k", o->k, "k-complex threshold")->capture_default_str();
  sc->add_option("--seeds", o->seeds, "comma-separated seed nodes")->required();
  sc->add_option("--runs", o->runs, "number of cascades")->capture_default_str();
  sc->add_option("--seed", o->seed, "master seed")->capture_default_str();
  sc->add_option("--out", o->out, "runs JSON-lines path")->required();
  return [o](Context& ctx) {
    BaselineConfig cfg;
    cfg.model = baseline_model_from_string(o->model);
    if (o->p) cfg.ic_p = *o->p;
    if (o->theta) {
      cfg.lt_threshold_dist = ThresholdDist::Constant;
      cfg.lt_theta = *o->theta;
    }
    cfg.k = o->k;
    cfg.validate();
    if (o->runs < 1) throw ParamError("runs", "must be at least 1");
    auto doc = load_graph(o->graph);
    auto seeds = parse_node_list(o->seeds, "seeds");
    ctx.manifest.inputs.push_back(o->graph);
    std::vector<CascadeRecord> recs(o->runs);
    for_each_index(o->runs, [&](std::size_t i) {
      recs[i] = run_baseline(doc.graph, seeds, cfg, derive_seed(o->seed, "baseline", i));
    });
    write_text_file(o->out, records_to_jsonl(recs));
    ctx.manifest.seed = o->seed;
    ctx.manifest.outputs = {o->out};
    ctx.manifest_dir = dir_of(o->out);
  };
}

json step_stats(std::vector<double> xs) {
  json j = {{"count", xs.size()}};
  if (xs.empty()) {
    j["mean"] = nullptr;
    j["median"] = nullptr;
    return j;
  }
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  j["mean"] = mean(xs);
  j["median"] = xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2.0;
  j["min"] = xs.front();
  j["max"] = xs.back();
  return j;
}

Action analyze(CLI::App* sc) {
  struct O {
    std::string runs, graph, report;
    std::size_t bins = 50;
    double viral_fraction = 0.5;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--runs", o->runs, "runs JSON-lines file")->required();
  sc->add_option("--graph", o->graph, "graph JSON (enables degree correlations)");
  sc->add_option("--report", o->report, "report JSON path")->required();
  sc->add_option("--bins", o->bins, "histogram bins")->capture_default_str();
  sc->add_option("--viral-fraction", o->viral_fraction, "virality threshold")->capture_default_str();
  return [o](Context& ctx) {
    if (o->bins < 1) throw ParamError("bins", "must be at least 1");
    if (!(o->viral_fraction > 0.0 && o->viral_fraction <= 1.0)) {
      throw ParamError("viral-fraction", "must lie in (0,1]");
    }
    auto recs = load_records(o->runs);
    ctx.manifest.inputs.push_back(o->runs);
    if (recs.empty()) throw ParamError("runs", "file holds no records");
    const std::size_t n = recs.front().node_count();
    for (const auto& r : recs) {
      if (r.node_count() != n) throw ParamError("runs", "records disagree on node count");
    }
    std::vector<double> spreads, tips, ttv;
    std::size_t viral = 0;
    for (const auto& r : recs) {
      spreads.push_back(double(r.final_spread));
      if (detect_virality(r, o->viral_fraction)) ++viral;
      if (auto t = tipping_point(r)) tips.push_back(double(*t));
      if (auto t = time_to_virality(r, o->viral_fraction)) ttv.push_back(double(*t));
    }
    Histogram h = histogram(spreads, o->bins, std::pair<double, double>{0.0, double(n)});
    const double nn = double(n);
    json report = {
        {"runs", recs.size()},
        {"nodes", n},
        {"viral_fraction", o->viral_fraction},
        {"virality_frequency", double(viral) / double(recs.size())},
        {"spread",
         {{"mean", mean(spreads)},
          {"stderr", standard_error(spreads)},
          {"min", *std::min_element(spreads.begin(), spreads.end())},
          {"max", *std::max_element(spreads.begin(), spreads.end())},
          {"below_tenth", double(std::count_if(spreads.begin(), spreads.end(),
                                               [&](double s) { return s < 0.1 * nn; })) /
                              double(recs.size())},
          {"above_half", double(std::count_if(spreads.begin(), spreads.end(),
                                              [&](double s) { return s > 0.5 * nn; })) /
                             double(recs.size())},
          {"middle_band", spread_mass(recs, 0.2, 0.8)}}},
        {"histogram", {{"edges", h.edges}, {"counts", h.counts}}},
        {"tipping_point", step_stats(tips)},
        {"time_to_virality", step_stats(ttv)},
    };
    json corr = {{"spearman_degree_spread", nullptr}, {"seed_nodes", nullptr}};
    if (!o->graph.empty()) {
      auto doc = load_graph(o->graph);
      ctx.manifest.inputs.push_back(o->graph);
      if (doc.graph.node_count() != n) throw ParamError("graph", "node count differs from the runs");
      std::map<NodeId, std::pair<double, std::size_t>> by_seed;
      for (const auto& r : recs) {
        if (r.seed_set.size() != 1) continue;
        auto& acc = by_seed[r.seed_set.front()];
        acc.first += double(r.final_spread);
        ++acc.second;
      }
      std::vector<double> deg, spread;
      for (const auto& [v, acc] : by_seed) {
        deg.push_back(double(doc.graph.raw().degree(v)));
        spread.push_back(acc.first / double(acc.second));
      }
      corr["seed_nodes"] = by_seed.size();
      try {
        corr["spearman_degree_spread"] = spearman(deg, spread);
      } catch (const std::exception& e) {
        log::warn(std::string("degree-spread correlation undefined: ") + e.what());
      }
    }
    report["correlations"] = corr;
    write_text_file(o->report, report.dump(2) + "\n");
    ctx.manifest.outputs = {o->report};
    ctx.manifest_dir = dir_of(o->report);
  };
}

const std::set<std::string> kExperimentCliKeys = {"rq", "out_dir", "out-dir", "jobs", "config"};

Action experiment(CLI::App* sc) {
  struct O {
    int rq = 0;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--rq", o->rq, "research question 1-5");
  sc->add_option("--out-dir", o->out_dir, "results directory")->required();
  sc->add_option("--seed", o->seed, "overrides master_seed");
  return [o](Context& ctx) {
    json cfg_json = json::object();
    if (!ctx.config.empty()) {
      cfg_json = read_json_file(ctx.config);
      if (!cfg_json.is_object()) throw ParamError("config", "expected a JSON object");
      if (o->rq == 0 && cfg_json.contains("rq")) {
        if (!cfg_json["rq"].is_number_integer()) throw ParamError("rq", "must be an integer");
        o->rq = cfg_json["rq"].get<int>();
      }
      for (const auto& k : kExperimentCliKeys) cfg_json.erase(k);
    }
    if (o->rq < 1 || o->rq > 5) throw ParamError("rq", "must be one of 1, 2, 3, 4, 5");
    ExperimentConfig cfg = experiment_config_from_json(cfg_json);
    if (o->seed) cfg.master_seed = *o->seed;
    cfg.validate();
    ResultSet rs = run_experiment(o->rq, cfg);
    for (const auto& w : rs.warnings) log::warn(w);
    ctx.manifest.outputs = write_results(rs, o->out_dir);
    ctx.manifest.seed = cfg.master_seed;
    ctx.manifest.config["experiment"] = experiment_config_to_json(cfg);
    ctx.manifest.config["rq"] = o->rq;
    ctx.manifest_dir = o->out_dir;
  };
}

struct TraceInputs {
  std::string graph, trust, ratings;
  std::uint64_t seed = 1;
  double train_fraction = 0.8;

  void add(CLI::App* sc) {
    sc->add_option("--graph", graph, "graph JSON (influence edges both ways along each edge)");
    sc->add_option("--trust", trust, "trust TSV: truster<TAB>trustee");
    sc->add_option("--ratings", ratings, "ratings TSV: user<TAB>product<TAB>time")->required();
    sc->add_option("--seed", seed, "seed for initialisation and the train/test split")->capture_default_str();
    sc->add_option("--train-fraction", train_fraction, "share of traces used for training")
        ->capture_default_str();
  }

  struct Loaded {
    InfluenceGraph graph;
    std::vector<CascadeTrace> traces;
    Split split;
  };

  // Node order depends only on the inputs, so learn and learn-eval agree.
  Loaded load(std::vector<fs::path>& inputs) const {
    if (graph.empty() && trust.empty()) throw ParamError("trust", "give --trust, --graph or both");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw ParamError("train-fraction", "must lie in (0,1)");
    }
    auto ratings_v = read_ratings_tsv(ratings);
    inputs.push_back(ratings);
    Loaded l;
    if (!trust.empty()) {
      auto pairs = read_trust_tsv(trust);
      inputs.push_back(trust);
      std::vector<std::string> extra;
      if (!graph.empty()) {
        auto doc = load_graph(graph);
        inputs.push_back(graph);
        for (std::size_t v = 0; v < doc.graph.node_count(); ++v) extra.push_back(std::to_string(v));
      }
      for (const auto& r : ratings_v) extra.push_back(r.user);
      l.graph = InfluenceGraph::from_trust(pairs, extra);
    } else {
      auto doc = load_graph(graph);
      inputs.push_back(graph);
      l.graph = InfluenceGraph::from_graph(doc.graph.raw());
    }
    l.traces = reconstruct_traces(l.graph, ratings_v);
    if (l.traces.empty()) throw ParamError("ratings", "no product has two or more raters");
    l.split = split_traces(l.traces.size(), seed, train_fraction);
    return l;
  }
};

json accuracy_json(const Accuracy& a) {
  return {{"correct", a.correct}, {"total", a.total}, {"accuracy", optional_json(a.value())}};
}

json eval_json(const EvalReport& r, std::size_t traces) {
  return {{"traces", traces},
          {"active_nonseeds", accuracy_json(r.active_nonseeds)},
          {"boundary", accuracy_json(r.boundary)},
          {"pooled", accuracy_json(r.pooled())},
          {"majority_baseline", r.pooled().total ? json(r.majority_baseline()) : json(nullptr)}};
}

Action learn(CLI::App* sc) {
  struct O {
    TraceInputs in;
    std::string form = "sum", boundary_weight = "equal", out;
    std::size_t steps = 200;
    double lr = 0.01;
    bool augment = false;
  };
  auto o = std::make_shared<O>();
  o->in.add(sc);
  sc->add_option("--form", o->form, "sum|mean")->capture_default_str();
  sc->add_option("--steps", o->steps, "gradient steps")->capture_default_str();
  sc->add_option("--lr", o->lr, "learning rate")->capture_default_str();
  sc->add_option("--boundary-weight", o->boundary_weight, "equal|raw")->capture_default_str();
  sc->add_flag("--augment", o->augment, "add prefix-subcascade losses");
  sc->add_option("--out", o->out, "model JSON path")->required();
  return [o](Context& ctx) {
    FitOptions fo;
    fo.steps = o->steps;
    fo.lr = o->lr;
    if (!(o->lr > 0.0) || !std::isfinite(o->lr)) throw ParamError("lr", "must be positive");
    if (o->boundary_weight == "equal") {
      fo.loss.weighting = BoundaryWeighting::Equal;
    } else if (o->boundary_weight == "raw") {
      fo.loss.weighting = BoundaryWeighting::Raw;
    } else {
      throw ParamError("boundary-weight", "expected equal|raw, got '" + o->boundary_weight + "'");
    }
    fo.loss.augment = o->augment;
    const Aggregation form = aggregation_from_string(o->form);
    auto l = o->in.load(ctx.manifest.inputs);
    auto train = pick<CascadeTrace>(l.traces, l.split.train);
    auto test = pick<CascadeTrace>(l.traces, l.split.test);
    FitResult fr = fit(train, l.graph, ThresholdModel::init(l.graph, form, o->in.seed), fo);
    json model = model_to_json(fr.model, l.graph);
    model["fit"] = {{"loss", fr.loss},
                    {"final_lr", fr.final_lr},
                    {"lr_halvings", fr.lr_halvings},
                    {"clamped", fr.clamped},
                    {"train", eval_json(evaluate(train, l.graph, fr.model), train.size())},
                    {"test", eval_json(evaluate(test, l.graph, fr.model), test.size())}};
    write_text_file(o->out, model.dump(2) + "\n");
    ctx.manifest.seed = o->in.seed;
    ctx.manifest.outputs = {o->out};
    ctx.manifest_dir = dir_of(o->out);
  };
}

Action learn_eval(CLI::App* sc) {
  struct O {
    TraceInputs in;
    std::string model, out;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--model", o->model, "fitted model JSON")->required();
  o->in.add(sc);
  sc->add_option("--out", o->out, "evaluation report JSON path")->required();
  return [o](Context& ctx) {
    auto l = o->in.load(ctx.manifest.inputs);
    ThresholdModel m = model_from_json(read_json_file(o->model), l.graph);
    ctx.manifest.inputs.push_back(o->model);
    auto train = pick<CascadeTrace>(l.traces, l.split.train);
    auto test = pick<CascadeTrace>(l.traces, l.split.test);
    json report = {{"aggregation", to_string(m.aggregation)},
                   {"train", eval_json(evaluate(train, l.graph, m), train.size())},
                   {"test", eval_json(evaluate(test, l.graph, m), test.size())}};
    write_text_file(o->out, report.dump(2) + "\n");
    ctx.manifest.seed = o->in.seed;
    ctx.manifest.outputs = {o->out};
    ctx.manifest_dir = dir_of(o->out);
  };
}

json estimate_json(const SpreadEstimate& e) {
  return {{"estimated_spread", e.mean}, {"stderr", e.stderr_}, {"runs", e.runs}};
}

Action optimize(CLI::App* sc) {
  struct O {
    std::string graph, out;
    NodeId seed_node = 0;
    std::size_t khop = 2, top_degree = 10;
    bool no_core_paths = false, dp = false;
    BeamConfig beam;
    DpConfig dpc;
    std::uint64_t seed = 1;
    SimFlags sim;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--graph", o->graph, "graph JSON")->required();
  sc->add_option("--seed-node", o->seed_node, "seed node v")->required();
  sc->add_option("--khop", o->khop, "candidate neighbourhood radius K")->capture_default_str();
  sc->add_option("--top-degree", o->top_degree, "highest-degree reachable nodes in the pool")
      ->capture_default_str();
  sc->add_flag("--no-core-paths", o->no_core_paths, "skip seed-to-core path nodes");
  sc->add_option("--beam", o->beam.width, "beam width B")->capture_default_str();
  sc->add_option("--rounds", o->beam.rounds, "refinement rounds T")->capture_default_str();
  sc->add_option("--perturb", o->beam.perturb, "perturbation scale")->capture_default_str();
  sc->add_option("--sims", o->beam.sims, "simulations per evaluation M")->capture_default_str();
  sc->add_option("--spawn", o->beam.spawn, "children per beam slot")->capture_default_str();
  sc->add_flag("--dp", o->dp, "also run the coarse DP policy");
  sc->add_option("--dp-horizon", o->dpc.horizon, "DP horizon")->capture_default_str();
  sc->add_option("--dp-sims", o->dpc.sims, "DP rollouts per codebook entry")->capture_default_str();
  sc->add_option("--seed", o->seed, "master seed")->capture_default_str();
  o->sim.add(sc);
  sc->add_option("--out", o->out, "best.json path")->required();
  return [o](Context& ctx) {
    SimParams p = o->sim.resolve();
    record_params(ctx, p);
    o->beam.validate();
    auto doc = load_graph(o->graph);
    const WeightedGraph& g = doc.graph;
    ctx.manifest.inputs.push_back(o->graph);
    if (o->seed_node >= g.node_count()) throw ParamError("seed-node", "node id out of range");
    const NodeId v = o->seed_node;
    const std::uint64_t runs_seed = derive_seed(o->seed, "optimize");
    auto pool = build_candidate_pool(g, v, o->khop, o->top_degree, !o->no_core_paths);
    BeamResult br = beam_search(g, v, pool, o->beam, p, runs_seed);
    const NodeId seeds[1] = {v};
    SpreadEstimate self = estimate_spread(g, self_propagation(g, seeds), v, o->beam.sims, p, runs_seed);
    json best = {{"vector", std::vector<double>(br.best.vector.vec().begin(), br.best.vector.vec().end())},
                 {"estimated_spread", br.best.score.mean},
                 {"stderr", br.best.score.stderr_},
                 {"trace", br.trace},
                 {"origin", br.best.origin},
                 {"evaluations", br.evaluations},
                 {"pool", {{"nodes", pool.nodes.size()}, {"candidates", pool.candidates.size()}}},
                 {"self_propagation", estimate_json(self)}};
    if (o->dp) {
      o->dpc.codebook = default_codebook(g, v, o->seed);
      DpResult dr = dp_policy(g, v, o->dpc, p, derive_seed(o->seed, "optimize.dp"));
      json codebook = json::array();
      for (const auto& c : o->dpc.codebook) codebook.push_back(std::vector<double>(c.vec().begin(), c.vec().end()));
      json value = json::array();
      for (const auto& t : dr.value) {
        json rows = json::array();
        for (const auto& r : t) rows.push_back(std::vector<double>(r.begin(), r.end()));
        value.push_back(rows);
      }
      json reach = json::array();
      for (const auto& r : dr.reachable) reach.push_back(std::vector<bool>(r.begin(), r.end()));
      best["dp"] = {{"codebook", codebook},
                    {"states", {"core", "intermediate", "periphery"}},
                    {"value", value},
                    {"reachable", reach},
                    {"first_reward", dr.first_reward},
                    {"first_value", dr.first_value},
                    {"recommended", dr.recommended}};
    }
    write_text_file(o->out, best.dump(2) + "\n");
    ctx.manifest.seed = o->seed;
    ctx.manifest.outputs = {o->out};
    ctx.manifest_dir = dir_of(o->out);
  };
}

Action plot(CLI::App* sc) {
  struct O {
    std::string table, kind = "line", x, y, column, title, out;
    std::size_t bins = 20;
  };
  auto o = std::make_shared<O>();
  sc->add_option("--table", o->table, "CSV table with a header row")->required();
  sc->add_option("--kind", o->kind, "line|hist")->capture_default_str();
  sc->add_option("--x", o->x, "x column for line plots (default: first)");
  sc->add_option("--y", o->y, "comma-separated y columns for line plots (default: all others)");
  sc->add_option("--column", o->column, "column for histograms (default: first)");
  sc->add_option("--bins", o->bins, "histogram bins")->capture_default_str();
  sc->add_option("--title", o->title, "plot title");
  sc->add_option("--out", o->out, "SVG path")->required();
  return [o](Context& ctx) {
    std::ifstream in(o->table, std::ios::binary);
    if (!in) throw ParamError("table", "cannot read " + o->table);
    std::stringstream ss;
    ss << in.rdbuf();
    Table t;
    try {
      t = parse_csv(ss.str());
    } catch (const CsvError& e) {
      throw ParamError("table", o->table + ": " + e.what());
    }
    ctx.manifest.inputs.push_back(o->table);
    auto col = [&](const std::string& name, const char* field) {
      try {
        return t.column(name);
      } catch (const std::out_of_range&) {
        throw ParamError(field, "no column named '" + name + "'");
      }
    };
    std::string svg;
    if (o->kind == "line") {
      const std::size_t xc = o->x.empty() ? 0 : col(o->x, "x");
      std::vector<std::size_t> ycols;
      if (o->y.empty()) {
        for (std::size_t c = 0; c < t.header.size(); ++c) {
          if (c != xc) ycols.push_back(c);
        }
      } else {
        for (const auto& name : parse_list(o->y)) ycols.push_back(col(name, "y"));
      }
      std::vector<Series> series;
      const auto xs = t.numbers(xc);
      for (std::size_t c : ycols) series.push_back({t.header[c], xs, t.numbers(c)});
      std::string ylabel = ycols.size() == 1 ? t.header[ycols.front()] : std::string("value");
      svg = svg_line_plot({o->title, t.header[xc], ylabel}, series);
    } else if (o->kind == "hist") {
      if (o->bins < 1) throw ParamError("bins", "must be at least 1");
      const std::size_t c = o->column.empty() ? 0 : col(o->column, "column");
      std::vector<double> vals;
      for (double v : t.numbers(c)) {
        if (!std::isnan(v)) vals.push_back(v);
      }
      svg = svg_histogram({o->title, t.header[c], "count"}, histogram(vals, o->bins));
    } else {
      throw ParamError("kind", "expected line|hist, got '" + o->kind + "'");
    }
    write_text_file(o->out, svg);
    ctx.manifest.outputs = {o->out};
    ctx.manifest_dir = dir_of(o->out);
  };
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return 2;
  }
  if (args.front() == "-h" || args.front() == "--help") {
    out << usage();
    return 0;
  }
  const std::string command = args.front();
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    err << "error: unknown command '" << command << "'\n\n" << usage();
    return 2;
  }

  CLI::App app{"contagion " + command, "contagion " + command};
  app.set_help_flag("-h,--help", "show this help");
  std::string config_path;
  int jobs = 0;
  app.add_option("--config", config_path, "JSON file of option values; explicit flags win");
  app.add_option("--jobs", jobs, "parallel workers (default: CONTAGION_JOBS or all cores)");

  static const std::map<std::string, Action (*)(CLI::App*)> builders = {
      {"netgen", netgen},     {"simulate", simulate},     {"baseline", baseline},
      {"analyze", analyze},   {"experiment", experiment}, {"learn", learn},
      {"learn-eval", learn_eval}, {"optimize", optimize}, {"plot", plot}};
  Action action = builders.at(command)(&app);

  std::vector<std::string> rest(args.begin() + 1, args.end());
  const auto t0 = std::chrono::steady_clock::now();
  try {
    for (std::size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == "--config" && i + 1 < rest.size()) config_path = rest[i + 1];
      if (rest[i].rfind("--config=", 0) == 0) config_path = rest[i].substr(9);
    }
    if (!config_path.empty() && command != "experiment") {
      rest = merge_config(rest, read_json_file(config_path), {"config"});
    }
    std::reverse(rest.begin(), rest.end());
    try {
      app.parse(rest);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n\n" << app.help();
      return 2;
    }
    set_worker_count(jobs);
    Context ctx{out, err, config_path, {}, {}};
    ctx.manifest.command = command;
    ctx.manifest.config = resolved_options(app);
    if (!config_path.empty()) ctx.manifest.inputs.push_back(config_path);
    action(ctx);
    ctx.manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto m = write_manifest(ctx.manifest_dir, ctx.manifest);
    out << "wrote";
    for (const auto& p : ctx.manifest.outputs) out << ' ' << p.string();
    out << " (manifest " << m.string() << ")\n";
    return 0;
  } catch (const ParamError& e) {
    const std::string what = e.what();
    err << "error: invalid value for '" << e.field() << "': " << what.substr(e.field().size() + 2) << "\n";
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace contagion::cli
