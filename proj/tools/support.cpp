#include <algorithm>
#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "cli.hpp"
#include "contagion/error.hpp"
#include "contagion/graph_io.hpp"

namespace contagion::cli {

using nlohmann::json;

namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

std::string scalar_text(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ParamError(key, "config values must be scalars or arrays of scalars");
}

}  // namespace

std::vector<std::string> merge_config(std::vector<std::string> args, const json& config,
                                      const std::set<std::string>& skip) {
  if (!config.is_object()) throw ParamError("config", "expected a JSON object");
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
  }
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (skip.count(it.key())) continue;
    const std::string flag = flag_name(it.key());
    if (given.count(flag)) continue;
    const json& v = it.value();
    if (v.is_null()) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) text += ',';
        text += scalar_text(v[i], it.key());
      }
    } else {
      text = scalar_text(v, it.key());
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

std::string sha256_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialisation failed");
  }
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), std::size_t(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::filesystem::path write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  const auto path = dir / "manifest.json";
  json doc = {{"tool", "contagion"}, {"version", CONTAGION_VERSION}, {"runs", json::array()}};
  if (std::filesystem::exists(path)) {
    try {
      json old = read_json_file(path);
      if (old.contains("runs") && old["runs"].is_array()) doc["runs"] = old["runs"];
    } catch (const std::exception&) {
      // Unreadable manifests are replaced.
    }
  }
  auto files = [&](const std::vector<std::filesystem::path>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back({{"path", p.lexically_normal().string()}, {"sha256", sha256_hex(p)}});
    return a;
  };
  json outputs = files(m.outputs);
  json entry = {{"command", m.command},
                {"config", m.config},
                {"seed", m.seed},
                {"inputs", files(m.inputs)},
                {"outputs", outputs},
                {"duration_seconds", m.duration_seconds}};
  auto same = [&](const json& e) {
    if (e.value("command", "") != m.command || !e.contains("outputs")) return false;
    const json& o = e["outputs"];
    if (o.size() != outputs.size()) return false;
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (o[i].value("path", "") != outputs[i]["path"]) return false;
    }
    return true;
  };
  json& runs = doc["runs"];
  auto it = std::find_if(runs.begin(), runs.end(), same);
  if (it != runs.end()) {
    *it = entry;
  } else {
    runs.push_back(entry);
  }
  write_text_file(path, doc.dump(2) + "\n");
  return path;
}

}  // namespace contagion::cli
