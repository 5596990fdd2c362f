#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "contagion/dynamics.hpp"

namespace contagion {

nlohmann::json params_to_json(const SimParams& p);
// Missing keys keep their defaults.
SimParams params_from_json(const nlohmann::json& j, SimParams base = {});

nlohmann::json record_to_json(const CascadeRecord& r);
CascadeRecord record_from_json(const nlohmann::json& j);

// One JSON object per line.
std::string records_to_jsonl(const std::vector<CascadeRecord>& records);
std::vector<CascadeRecord> load_records(const std::filesystem::path& path);

}  // namespace contagion
