#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace igc::cli {

/// Everything needed to re-run a command: its argv, working directory and the
/// resolved settings. Written next to every output.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string working_directory;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  double duration_seconds = 0.0;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& doc);
};

std::filesystem::path manifest_path_for(const std::filesystem::path& output);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace igc::cli
