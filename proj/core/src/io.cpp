#include "igc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "igc/random.hpp"

namespace igc {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* begin = text.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::vector<std::string> column_names(const std::string& prefix, Index count) {
  std::vector<std::string> names;
  for (Index d = 1; d <= count; ++d) names.push_back(prefix + std::to_string(d));
  return names;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  CsvTable table;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], values[i]);
    if (first) {
      first = false;
      if (!numeric) {
        table.header = std::move(fields);
        continue;
      }
      table.header = column_names("x", static_cast<Index>(fields.size()));
    }
    if (!numeric) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (values.size() != table.header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " fields, found " +
                               std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (first) throw std::runtime_error(path.string() + ": empty file");
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& values) {
  if (static_cast<Index>(header.size()) != values.cols()) {
    throw std::invalid_argument("write_csv: header has " + std::to_string(header.size()) + " names for " +
                                std::to_string(values.cols()) + " columns");
  }
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += format_double(values(r, c));
    }
    out += '\n';
  }
  write_file_atomically(path, out);
}

// ---------------------------------------------------------------------------

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(std::string_view(line).substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) { return parse_key_values(read_text(path)); }

namespace {

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!parse_double(value, out)) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + value + "'");
}

}  // namespace

void apply_key_values(TrainConfig& config, const KeyValues& values) {
  for (const auto& [key, value] : values) {
    if (key == "hidden_units") {
      config.hidden_units.clear();
      if (!value.empty()) {
        for (const auto& part : split(value, ',')) config.hidden_units.push_back(parse_integer<int>(key, part));
      }
    } else if (key == "noise_dim") {
      config.noise_dim = parse_integer<int>(key, value);
    } else if (key == "model_samples") {
      config.model_samples = parse_integer<int>(key, value);
    } else if (key == "batch_size") {
      config.batch_size = parse_integer<int>(key, value);
    } else if (key == "epochs") {
      config.epochs = parse_integer<int>(key, value);
    } else if (key == "alpha") {
      config.alpha = parse_real(key, value);
    } else if (key == "softrank_iqr_scaling") {
      config.softrank_iqr_scaling = parse_bool(key, value);
    } else if (key == "learning_rate") {
      config.adam.learning_rate = parse_real(key, value);
    } else if (key == "beta1") {
      config.adam.beta1 = parse_real(key, value);
    } else if (key == "beta2") {
      config.adam.beta2 = parse_real(key, value);
    } else if (key == "adam_epsilon") {
      config.adam.epsilon = parse_real(key, value);
    } else if (key == "marginal_samples") {
      config.marginal_samples = parse_integer<std::int64_t>(key, value);
    } else if (key == "cdf_knots") {
      config.cdf_knots = parse_integer<int>(key, value);
    } else if (key == "seed") {
      config.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "fresh_noise_per_epoch") {
      config.fresh_noise_per_epoch = parse_bool(key, value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
}

KeyValues to_key_values(const TrainConfig& config) {
  KeyValues kv;
  std::string hidden;
  for (std::size_t i = 0; i < config.hidden_units.size(); ++i) {
    if (i) hidden += ',';
    hidden += std::to_string(config.hidden_units[i]);
  }
  kv["hidden_units"] = hidden;
  kv["noise_dim"] = std::to_string(config.noise_dim);
  kv["model_samples"] = std::to_string(config.model_samples);
  kv["batch_size"] = std::to_string(config.batch_size);
  kv["epochs"] = std::to_string(config.epochs);
  kv["alpha"] = format_double(config.alpha);
  kv["softrank_iqr_scaling"] = config.softrank_iqr_scaling ? "true" : "false";
  kv["learning_rate"] = format_double(config.adam.learning_rate);
  kv["beta1"] = format_double(config.adam.beta1);
  kv["beta2"] = format_double(config.adam.beta2);
  kv["adam_epsilon"] = format_double(config.adam.epsilon);
  kv["marginal_samples"] = std::to_string(config.marginal_samples);
  kv["cdf_knots"] = std::to_string(config.cdf_knots);
  kv["seed"] = std::to_string(config.seed);
  kv["fresh_noise_per_epoch"] = config.fresh_noise_per_epoch ? "true" : "false";
  return kv;
}

std::string format_key_values(const KeyValues& values) {
  std::string out;
  for (const auto& [key, value] : values) out += key + " = " + value + "\n";
  return out;
}

// ---------------------------------------------------------------------------

using nlohmann::json;

std::string serialize_model(const TrainedCopulaModel& model) {
  json doc;
  doc["format"] = kArchiveFormat;
  doc["version"] = kArchiveVersion;
  doc["rng"] = Rng::kMethodTag;
  doc["init"] = TrainedCopulaModel::kInitScheme;
  doc["seed"] = model.config().seed;
  doc["config"] = to_key_values(model.config());

  json layers = json::array();
  for (const auto& layer : model.params().layers()) {
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Index r = 0; r < layer.weights.rows(); ++r) {
      for (Index c = 0; c < layer.weights.cols(); ++c) weights.push_back(layer.weights(r, c));
    }
    layers.push_back({{"fan_in", layer.weights.rows()},
                      {"fan_out", layer.weights.cols()},
                      {"activation", to_string(layer.activation)},
                      {"weights", weights},
                      {"bias", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}});
  }
  doc["generator"] = {{"input_dim", model.params().input_dim()},
                      {"output_dim", model.params().output_dim()},
                      {"layers", layers}};

  json marginals = json::array();
  for (const auto& table : model.marginals()) {
    marginals.push_back({{"dimension", table.dimension},
                         {"sample_count", table.sample_count},
                         {"lower", table.cdf.lower_clamp()},
                         {"upper", table.cdf.upper_clamp()},
                         {"knots", table.cdf.knots()},
                         {"probs", table.cdf.probs()}});
  }
  doc["marginals"] = marginals;

  json history = json::array();
  for (const auto& e : model.loss_history()) history.push_back({e.epoch, e.softrank_loss, e.hard_rank_loss});
  doc["loss_history"] = history;
  return doc.dump(1) + "\n";
}

TrainedCopulaModel deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model archive is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string{}) != kArchiveFormat) {
    throw std::runtime_error("not an igc model archive");
  }
  const int version = doc.value("version", -1);
  if (version != kArchiveVersion) {
    throw std::runtime_error("model archive version " + std::to_string(version) + " is not supported (expected " +
                             std::to_string(kArchiveVersion) + ")");
  }
  try {
    TrainConfig config;
    KeyValues kv = doc.at("config").get<KeyValues>();
    apply_key_values(config, kv);

    std::vector<DenseLayer> layers;
    for (const auto& jl : doc.at("generator").at("layers")) {
      const Index rows = jl.at("fan_in").get<Index>();
      const Index cols = jl.at("fan_out").get<Index>();
      const auto weights = jl.at("weights").get<std::vector<double>>();
      const auto bias = jl.at("bias").get<std::vector<double>>();
      if (static_cast<Index>(weights.size()) != rows * cols || static_cast<Index>(bias.size()) != cols) {
        throw std::runtime_error("layer parameter count does not match its shape");
      }
      DenseLayer layer;
      layer.weights.resize(rows, cols);
      for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) layer.weights(r, c) = weights[static_cast<std::size_t>(r * cols + c)];
      }
      layer.bias = Eigen::Map<const Vector>(bias.data(), cols);
      layer.activation = activation_from_string(jl.at("activation").get<std::string>());
      layers.push_back(std::move(layer));
    }
    GeneratorParams params(std::move(layers));

    std::vector<MarginalCdfTable> marginals;
    for (const auto& jm : doc.at("marginals")) {
      MarginalCdfTable table;
      table.dimension = jm.at("dimension").get<int>();
      table.sample_count = jm.at("sample_count").get<std::int64_t>();
      table.cdf = PiecewiseLinearCdf(jm.at("knots").get<std::vector<double>>(),
                                     jm.at("probs").get<std::vector<double>>(), jm.at("lower").get<double>(),
                                     jm.at("upper").get<double>());
      marginals.push_back(std::move(table));
    }

    std::vector<EpochLoss> history;
    for (const auto& row : doc.at("loss_history")) {
      history.push_back(EpochLoss{row.at(0).get<int>(), row.at(1).get<double>(), row.at(2).get<double>()});
    }
    return TrainedCopulaModel(std::move(params), std::move(marginals), std::move(config), std::move(history));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed model archive: ") + e.what());
  }
}

void save_model(const TrainedCopulaModel& model, const std::filesystem::path& path) {
  write_file_atomically(path, serialize_model(model));
}

TrainedCopulaModel load_model(const std::filesystem::path& path) { return deserialize_model(read_text(path)); }

}  // namespace igc
