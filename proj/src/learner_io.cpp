#include "contagion/learner_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "contagion/error.hpp"

namespace contagion {

using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

// Calls fn(fields, line_no) for each data line.
template <class Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fn(split_tabs(line), no);
  }
}

bool is_index(const std::string& s) {
  return !s.empty() && s.size() < 10 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

json label_json(const std::string& s) { return is_index(s) ? json(std::stoull(s)) : json(s); }

std::string label_of(const json& j, const char* field) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_unsigned() || j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParamError(field, "node labels must be strings or integers");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_trust_tsv(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_line(text, [&](const std::vector<std::string>& f, std::size_t no) {
    if (f.size() != 2 || f[0].empty() || f[1].empty()) {
      throw ParamError("trust", "line " + std::to_string(no) + ": expected truster<TAB>trustee");
    }
    out.emplace_back(f[0], f[1]);
  });
  return out;
}

std::vector<Rating> parse_ratings_tsv(const std::string& text) {
  std::vector<Rating> out;
  for_each_line(text, [&](const std::vector<std::string>& f, std::size_t no) {
    const std::string where = "line " + std::to_string(no) + ": ";
    if (f.size() != 3 || f[0].empty() || f[1].empty()) {
      throw ParamError("ratings", where + "expected user<TAB>product<TAB>timestamp");
    }
    std::int64_t t = 0;
    try {
      std::size_t used = 0;
      t = std::stoll(f[2], &used);
      if (used != f[2].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParamError("ratings", where + "timestamp '" + f[2] + "' is not an integer");
    }
    out.push_back({f[0], f[1], t});
  });
  return out;
}

std::vector<std::pair<std::string, std::string>> read_trust_tsv(const std::filesystem::path& path) {
  return parse_trust_tsv(slurp(path));
}

std::vector<Rating> read_ratings_tsv(const std::filesystem::path& path) { return parse_ratings_tsv(slurp(path)); }

json model_to_json(const ThresholdModel& m, const InfluenceGraph& g) {
  json I = json::array();
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    auto nb = g.in(NodeId(v));
    for (std::size_t k = 0; k < nb.size(); ++k) {
      I.push_back(json::array({label_json(g.label(NodeId(v))), label_json(g.label(nb[k])),
                               m.influence[g.slot(NodeId(v), k)]}));
    }
  }
  json nodes = json::array();
  for (std::size_t v = 0; v < g.node_count(); ++v) nodes.push_back(label_json(g.label(NodeId(v))));
  return json{{"aggregation", to_string(m.aggregation)}, {"I", I}, {"b", m.bias}, {"nodes", nodes}};
}

ThresholdModel model_from_json(const json& j, const InfluenceGraph& g) {
  ThresholdModel m = ThresholdModel::zeros(g, aggregation_from_string(j.at("aggregation").get<std::string>()));
  const json& b = j.at("b");
  if (!b.is_array() || b.size() != g.node_count()) throw ParamError("b", "expected one bias per node");
  if (j.contains("nodes")) {
    const json& nodes = j["nodes"];
    if (nodes.size() != g.node_count()) throw ParamError("nodes", "node count does not match the graph");
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (label_of(nodes[v], "nodes") != g.label(NodeId(v))) {
        throw ParamError("nodes", "node order does not match the graph at index " + std::to_string(v));
      }
    }
  }
  for (std::size_t v = 0; v < g.node_count(); ++v) m.bias[v] = b[v].get<double>();
  for (const json& e : j.at("I")) {
    if (!e.is_array() || e.size() != 3) throw ParamError("I", "entries must be [v, w, value]");
    auto v = g.find(label_of(e[0], "I")), w = g.find(label_of(e[1], "I"));
    if (!v || !w) throw ParamError("I", "unknown node in influence entry");
    auto nb = g.in(*v);
    auto it = std::lower_bound(nb.begin(), nb.end(), *w);
    if (it == nb.end() || *it != *w) throw ParamError("I", "influence entry is not an edge of the graph");
    m.influence[g.slot(*v, std::size_t(it - nb.begin()))] = e[2].get<double>();
  }
  return m;
}

}  // namespace contagion
