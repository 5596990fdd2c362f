#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"
#include "contagion/graph_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = contagion::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

fs::path scratch(const char* name) {
  fs::path d = fs::temp_directory_path() / (std::string("contagion_cli_") + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

json without_durations(json m) {
  for (auto& r : m["runs"]) r.erase("duration_seconds");
  return m;
}

// netgen -> simulate -> analyze in `dir`.
void pipeline(const fs::path& dir, const std::string& jobs) {
  const std::string g = (dir / "g.json").string(), runs = (dir / "runs.jsonl").string();
  REQUIRE(cli({"netgen", "--nodes", "150", "--attach", "2", "--embed-dim", "4", "--seed", "3", "--out", g,
               "--jobs", jobs})
              .code == 0);
  REQUIRE(cli({"simulate", "--graph", g, "--seeds", "0", "--runs", "30", "--gamma", "0.5", "--seed", "5", "--out",
               runs, "--jobs", jobs})
              .code == 0);
  REQUIRE(cli({"analyze", "--runs", runs, "--graph", g, "--report", (dir / "report.json").string(), "--jobs", jobs})
              .code == 0);
}

}  // namespace

TEST_CASE("usage and argument errors") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  Result r = cli({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown command") != std::string::npos);
  r = cli({"netgen", "--out", "x.json", "--nodez", "5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("nodez") != std::string::npos);
  CHECK(cli({"netgen", "--help"}).code == 0);
}

TEST_CASE("netgen example and size validation") {
  fs::path d = scratch("netgen");
  Result r = cli({"netgen", "--nodes", "3", "--attach", "2", "--embed-dim", "2", "--seed", "1", "--out",
                  (d / "g.json").string()});
  REQUIRE(r.code == 0);
  auto doc = contagion::load_graph(d / "g.json");
  CHECK(doc.graph.node_count() == 3);
  CHECK(doc.graph.raw().edge_count() == 3);
  CHECK(fs::exists(d / "manifest.json"));

  r = cli({"netgen", "--nodes", "2", "--attach", "2", "--out", (d / "bad.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("'nodes'") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "bad.json"));
  fs::remove_all(d);
}

TEST_CASE("config files fill options and explicit flags win") {
  auto merged = contagion::cli::merge_config({"--nodes", "50"},
                                             json{{"nodes", 10}, {"embed_dim", 3}, {"dp", true}, {"seeds", {1, 2}}},
                                             {});
  CHECK(merged == std::vector<std::string>{"--nodes", "50", "--dp", "--embed-dim", "3", "--seeds", "1,2"});
  CHECK_THROWS(contagion::cli::merge_config({}, json{{"x", {{"y", 1}}}}, {}));

  fs::path d = scratch("config");
  spit(d / "cfg.json", R"({"nodes": 40, "attach": 3, "embed_dim": 4})");
  REQUIRE(cli({"netgen", "--config", (d / "cfg.json").string(), "--nodes", "60", "--out", (d / "g.json").string()})
              .code == 0);
  auto doc = contagion::load_graph(d / "g.json");
  CHECK(doc.graph.node_count() == 60);
  CHECK(doc.attach == 3);
  CHECK(doc.graph.dim() == 4);
  fs::remove_all(d);
}

TEST_CASE("pipeline is deterministic and recorded in the manifest") {
  fs::path a = scratch("pipe_a"), b = scratch("pipe_b");
  pipeline(a, "1");
  pipeline(b, "1");
  for (const char* f : {"g.json", "runs.jsonl", "report.json"}) CHECK(slurp(a / f) == slurp(b / f));

  json m = json::parse(slurp(a / "manifest.json"));
  CHECK(m["runs"].size() == 3);
  const json& sim = m["runs"][1];
  CHECK(sim["command"] == "simulate");
  CHECK(sim["outputs"][0]["sha256"] == contagion::cli::sha256_hex(a / "runs.jsonl"));
  CHECK(sim["inputs"][0]["sha256"] == contagion::cli::sha256_hex(a / "g.json"));

  // Re-running replaces the entry instead of appending.
  pipeline(a, "1");
  json again = json::parse(slurp(a / "manifest.json"));
  CHECK(again["runs"].size() == 3);

  json report = json::parse(slurp(a / "report.json"));
  CHECK(report["runs"] == 30);
  CHECK(report["nodes"] == 150);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("worker count does not change results") {
  fs::path a = scratch("jobs_1"), b = scratch("jobs_4");
  pipeline(a, "1");
  pipeline(b, "4");
  for (const char* f : {"g.json", "runs.jsonl", "report.json"}) CHECK(slurp(a / f) == slurp(b / f));
  json ma = json::parse(slurp(a / "manifest.json")), mb = json::parse(slurp(b / "manifest.json"));
  for (std::size_t i = 0; i < ma["runs"].size(); ++i) {
    CHECK(ma["runs"][i]["outputs"].size() == mb["runs"][i]["outputs"].size());
    CHECK(ma["runs"][i]["outputs"][0]["sha256"] == mb["runs"][i]["outputs"][0]["sha256"]);
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sha256 of a known input") {
  fs::path d = scratch("sha");
  spit(d / "abc.txt", "abc");
  CHECK(contagion::cli::sha256_hex(d / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove_all(d);
}

TEST_CASE("baseline and plot") {
  fs::path d = scratch("plot");
  const std::string g = (d / "g.json").string();
  REQUIRE(cli({"netgen", "--nodes", "80", "--embed-dim", "3", "--out", g}).code == 0);
  REQUIRE(cli({"baseline", "--model", "ic", "--p", "0.2", "--graph", g, "--seeds", "0,1", "--runs", "5", "--out",
               (d / "ic.jsonl").string()})
              .code == 0);
  CHECK(cli({"baseline", "--model", "sir", "--graph", g, "--seeds", "0", "--out", (d / "x.jsonl").string()}).code ==
        1);

  spit(d / "t.csv", "x,y,z\n0,1,2\n1,3,1\n2,2,0\n");
  REQUIRE(cli({"plot", "--table", (d / "t.csv").string(), "--x", "x", "--y", "y,z", "--title", "demo", "--out",
               (d / "t.svg").string()})
              .code == 0);
  CHECK(slurp(d / "t.svg").find("demo") != std::string::npos);
  REQUIRE(cli({"plot", "--table", (d / "t.csv").string(), "--kind", "hist", "--column", "y", "--bins", "2", "--out",
               (d / "h.svg").string()})
              .code == 0);
  spit(d / "bad.csv", "x,y\n1\n");
  Result r = cli({"plot", "--table", (d / "bad.csv").string(), "--out", (d / "b.svg").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("learn and learn-eval") {
  fs::path d = scratch("learn");
  std::string trust, ratings;
  for (int v = 1; v < 8; ++v) trust += std::to_string(v) + "\t" + std::to_string(v - 1) + "\n";
  for (int p = 0; p < 6; ++p) {
    for (int v = 0; v < 4 + p % 3; ++v) ratings += std::to_string(v) + "\tp" + std::to_string(p) + "\t" + std::to_string(v) + "\n";
  }
  spit(d / "trust.tsv", trust);
  spit(d / "ratings.tsv", ratings);
  const std::string model = (d / "model.json").string();
  REQUIRE(cli({"learn", "--trust", (d / "trust.tsv").string(), "--ratings", (d / "ratings.tsv").string(), "--form",
               "mean", "--steps", "20", "--out", model})
              .code == 0);
  json m = json::parse(slurp(model));
  CHECK(m["aggregation"] == "mean");
  CHECK(m["fit"]["loss"].size() == 21);
  REQUIRE(cli({"learn-eval", "--trust", (d / "trust.tsv").string(), "--ratings", (d / "ratings.tsv").string(),
               "--model", model, "--out", (d / "eval.json").string()})
              .code == 0);
  json e = json::parse(slurp(d / "eval.json"));
  CHECK(e.contains("train"));
  CHECK(e.contains("test"));
  fs::remove_all(d);
}

TEST_CASE("experiment and optimize") {
  fs::path d = scratch("exp");
  spit(d / "cfg.json",
       R"({"graph": {"nodes": 80, "embed_dim": 3}, "params": {"gamma": 0.3}, "runs_per_node": 1,
           "node_selection": "sample:5", "bins": 5})");
  Result r = cli({"experiment", "--rq", "1", "--config", (d / "cfg.json").string(), "--out-dir", (d / "rq1").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(d / "rq1" / "summary.json"));
  CHECK(fs::exists(d / "rq1" / "rq1_histogram.svg"));
  CHECK(fs::exists(d / "rq1" / "manifest.json"));
  CHECK(cli({"experiment", "--rq", "9", "--config", (d / "cfg.json").string(), "--out-dir", (d / "x").string()})
            .code == 1);

  const std::string g = (d / "g.json").string();
  REQUIRE(cli({"netgen", "--nodes", "80", "--embed-dim", "3", "--out", g}).code == 0);
  REQUIRE(cli({"optimize", "--graph", g, "--seed-node", "70", "--khop", "1", "--top-degree", "2", "--rounds", "1",
               "--sims", "10", "--gamma", "0.3", "--dp", "--dp-sims", "5", "--out", (d / "best.json").string()})
              .code == 0);
  json best = json::parse(slurp(d / "best.json"));
  CHECK(best["vector"].size() == 3);
  CHECK(best.contains("dp"));
  CHECK(best["estimated_spread"].get<double>() >= best["self_propagation"]["estimated_spread"].get<double>() - 1e-12);
  fs::remove_all(d);
}
