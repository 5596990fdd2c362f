#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "contagion/learner.hpp"

namespace contagion {

// truster<TAB>trustee per line; blank lines and '#' comments skipped.
std::vector<std::pair<std::string, std::string>> read_trust_tsv(const std::filesystem::path& path);
// user<TAB>product<TAB>timestamp(integer) per line.
std::vector<Rating> read_ratings_tsv(const std::filesystem::path& path);

std::vector<std::pair<std::string, std::string>> parse_trust_tsv(const std::string& text);
std::vector<Rating> parse_ratings_tsv(const std::string& text);

// {aggregation, I: [[v, w, val], ...], b: [...], nodes: [...]}; labels that
// are plain non-negative integers are written as numbers.
nlohmann::json model_to_json(const ThresholdModel& m, const InfluenceGraph& g);
// Throws ParamError when an edge or label is not part of g.
ThresholdModel model_from_json(const nlohmann::json& j, const InfluenceGraph& g);

}  // namespace contagion
