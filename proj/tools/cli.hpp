#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace contagion::cli {

// Runs one subcommand; args excludes the program name. Returns the exit status.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

// Appends `--key value` for every config entry whose flag is absent from args,
// so explicit flags win. Underscores in keys become dashes; arrays are
// comma-joined; `true` appends a bare flag and `false` is dropped.
std::vector<std::string> merge_config(std::vector<std::string> args, const nlohmann::json& config,
                                      const std::set<std::string>& skip = {});

std::string sha256_hex(const std::filesystem::path& file);

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  double duration_seconds = 0.0;
};

// Records `m` in <dir>/manifest.json, replacing an earlier entry for the same
// command and outputs. Returns the manifest path.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const RunManifest& m);

}  // namespace contagion::cli
