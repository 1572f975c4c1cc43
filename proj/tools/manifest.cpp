#include "manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "igc/igc.hpp"
#include "igc/io.hpp"

namespace igc::cli {

using nlohmann::json;

json RunManifest::to_json() const {
  json doc;
  doc["manifest"] = "igc-run";
  doc["library_version"] = kVersion;
  doc["command"] = command;
  doc["argv"] = argv;
  doc["working_directory"] = working_directory;
  doc["config"] = config;
  doc["seeds"] = seeds;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  doc["duration_seconds"] = duration_seconds;
  doc["notes"] = notes;
  return doc;
}

RunManifest RunManifest::from_json(const json& doc) {
  if (doc.value("manifest", std::string{}) != "igc-run") throw std::runtime_error("not an igc run manifest");
  RunManifest m;
  m.command = doc.at("command").get<std::string>();
  m.argv = doc.at("argv").get<std::vector<std::string>>();
  m.working_directory = doc.at("working_directory").get<std::string>();
  m.config = doc.value("config", json::object());
  m.seeds = doc.value("seeds", std::map<std::string, std::uint64_t>{});
  m.inputs = doc.value("inputs", std::map<std::string, std::string>{});
  m.outputs = doc.value("outputs", std::map<std::string, std::string>{});
  m.duration_seconds = doc.value("duration_seconds", 0.0);
  m.notes = doc.value("notes", std::vector<std::string>{});
  return m;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  auto p = output;
  p += ".manifest.json";
  return p;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  write_file_atomically(path, manifest.to_json().dump(2) + "\n");
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path.string() + "'");
  try {
    return RunManifest::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest '" + path.string() + "': " + e.what());
  }
}

}  // namespace igc::cli
