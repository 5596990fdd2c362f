#include "contagion/record_io.hpp"

#include <fstream>
#include <stdexcept>

namespace contagion {

using nlohmann::json;

json params_to_json(const SimParams& p) {
  return json{{"alpha", p.alpha},
              {"beta", p.beta},
              {"gamma", p.gamma},
              {"epsilon", p.epsilon},
              {"lambda", p.lambda},
              {"max_steps", p.max_steps},
              {"viral_fraction", p.viral_fraction},
              {"local_form", to_string(p.local_form)},
              {"dynamic_weights", p.dynamic_weights}};
}

SimParams params_from_json(const json& j, SimParams p) {
  p.alpha = j.value("alpha", p.alpha);
  p.beta = j.value("beta", p.beta);
  p.gamma = j.value("gamma", p.gamma);
  p.epsilon = j.value("epsilon", p.epsilon);
  p.lambda = j.value("lambda", p.lambda);
  p.max_steps = j.value("max_steps", p.max_steps);
  p.viral_fraction = j.value("viral_fraction", p.viral_fraction);
  if (j.contains("local_form")) p.local_form = local_form_from_string(j["local_form"].get<std::string>());
  p.dynamic_weights = j.value("dynamic_weights", p.dynamic_weights);
  return p;
}

json record_to_json(const CascadeRecord& r) {
  json j;
  j["model"] = r.model;
  if (r.model == "up") {
    j["params"] = params_to_json(r.params);
  } else {
    json mp = json::object();
    for (const auto& [k, v] : r.model_params) mp[k] = v;
    j["params"] = std::move(mp);
  }
  j["seed_set"] = r.seed_set;
  j["propagation"] = r.propagation;
  j["rng_seed"] = r.rng_seed;
  j["activation_time"] = r.activation_time;
  j["new_per_step"] = r.new_per_step;
  j["final_spread"] = r.final_spread;
  j["converged_at"] = r.converged_at;
  j["hit_cap"] = r.hit_cap;
  return j;
}

CascadeRecord record_from_json(const json& j) {
  CascadeRecord r;
  r.model = j.value("model", std::string("up"));
  if (r.model == "up") {
    r.params = params_from_json(j.at("params"));
  } else {
    for (const auto& [k, v] : j.at("params").items()) r.model_params.emplace_back(k, v.get<double>());
  }
  r.seed_set = j.at("seed_set").get<std::vector<NodeId>>();
  r.propagation = j.at("propagation").get<std::vector<double>>();
  r.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  r.activation_time = j.at("activation_time").get<std::vector<std::int32_t>>();
  r.new_per_step = j.at("new_per_step").get<std::vector<std::size_t>>();
  r.final_spread = j.at("final_spread").get<std::size_t>();
  r.converged_at = j.at("converged_at").get<std::size_t>();
  r.hit_cap = j.at("hit_cap").get<bool>();
  return r;
}

std::string records_to_jsonl(const std::vector<CascadeRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<CascadeRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<CascadeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace contagion
