#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "igc/model.hpp"
#include "igc/types.hpp"

namespace igc {

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// Header line plus rows of comma-separated decimals. Numbers are written with
/// 17 significant digits, which round-trips every double.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values);
std::string format_double(double value);

/// {prefix1, prefix2, ..., prefixD}
std::vector<std::string> column_names(const std::string& prefix, Index count);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

// ---------------------------------------------------------------------------
// Config files: flat `key = value` lines, '#' comments.

using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(const std::filesystem::path& path);
KeyValues parse_key_values(const std::string& text);
/// Applies known keys to `config`. Throws on unknown keys or bad values.
void apply_key_values(TrainConfig& config, const KeyValues& values);
KeyValues to_key_values(const TrainConfig& config);
std::string format_key_values(const KeyValues& values);

// ---------------------------------------------------------------------------
// Model archive: self-describing JSON text. Doubles use shortest round-trip
// formatting so reloading reproduces every weight and knot bit for bit.

inline constexpr const char* kArchiveFormat = "igc-model";
inline constexpr int kArchiveVersion = 1;

std::string serialize_model(const TrainedCopulaModel& model);
TrainedCopulaModel deserialize_model(const std::string& text);
void save_model(const TrainedCopulaModel& model, const std::filesystem::path& path);
TrainedCopulaModel load_model(const std::filesystem::path& path);

}  // namespace igc
