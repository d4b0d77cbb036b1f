#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrspec/cli_config.hpp"
#include "corrspec/common.hpp"
#include "corrspec/stats.hpp"

namespace corrspec {

/// Provenance record written beside every CLI run's outputs: parameters,
/// seed, tool version and content hashes. Deliberately free of timestamps
/// and absolute output paths so identical seeded reruns are byte-identical.
class Manifest {
 public:
  Manifest(std::string command, const RunConfig& config)
      : command_(std::move(command)), config_(config) {}

  void add_input(const std::string& path) { inputs_.push_back({path, hash_file(path)}); }

  /// `relative` is the path recorded in the manifest; `full` the file on disk.
  void add_output(const std::string& relative, const std::string& full) {
    outputs_.push_back({relative, hash_file(full)});
  }

  void note(const std::string& key, const std::string& value) { notes_[key] = value; }

  void write(const std::string& path) const {
    nlohmann::json j;
    j["command"] = command_;
    j["version"] = kVersion;
    j["seed"] = config_.seed;
    nlohmann::json params;
    for (const auto& [key, value] : config_.to_kv()) {
      if (key == "out") continue;  // the manifest lives inside the output dir
      params[key] = value;
    }
    j["parameters"] = params;
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [file, hash] : inputs_) {
      inputs.push_back({{"path", file}, {"fnv1a64", hash}});
    }
    j["inputs"] = inputs;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [file, hash] : outputs_) {
      outputs.push_back({{"path", file}, {"fnv1a64", hash}});
    }
    j["outputs"] = outputs;
    if (!notes_.empty()) {
      nlohmann::json notes;
      for (const auto& [key, value] : notes_) notes[key] = value;
      j["notes"] = notes;
    }
    std::ofstream out(path);
    if (!out) fail(Errc::io_error, "cannot write manifest: " + path);
    out << j.dump(2) << "\n";
  }

  static std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot hash missing file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    return std::string(hex);
  }

 private:
  std::string command_;
  RunConfig config_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::map<std::string, std::string> notes_;
};

}  // namespace corrspec
