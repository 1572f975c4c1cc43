#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "igc/model.hpp"
#include "manifest.hpp"

namespace igc::cli {

struct GenerateOptions {
  std::string family = "clayton";  // copula family or toy dataset name
  double theta = 2.0;
  double rho = 0.5;
  double nu = 4.0;
  int rotation = 0;
  int dimension = 2;
  bool random_params = false;
  Index n = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::filesystem::path out_x;  // data-space file for gaussian_mixture
};

struct TrainOptions {
  std::filesystem::path data;
  std::filesystem::path config_file;
  std::filesystem::path out;
  std::filesystem::path loss_out;
  std::vector<std::string> overrides;  // key=value pairs applied after the config file
  double train_frac = 1.0;
  std::uint64_t split_seed = 0;
  std::filesystem::path holdout_out;
  bool quiet = false;
};

struct SampleOptions {
  std::filesystem::path model;
  Index n = 10000;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::filesystem::path marginals;
};

struct EvaluateOptions {
  std::filesystem::path data;
  std::filesystem::path model;
  std::filesystem::path samples;
  std::vector<std::string> baselines;
  std::filesystem::path fit_data;  // baselines are fit here; defaults to `data`
  std::vector<std::string> metrics{"ise", "energy", "mmd", "tau", "ks"};
  Index model_samples = 100000;
  Index pair_cap = 5000;
  std::optional<double> bandwidth;
  bool force = false;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

struct BenchmarkOptions {
  std::string suite = "bivariate";
  int repetitions = 25;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "benchmark_out";
  int threads = 1;
  int epochs = 500;
  std::vector<std::string> families{"student_t", "clayton", "gumbel", "gaussian_mixture"};
  Index model_samples = 100000;
  std::int64_t marginal_samples = 1'000'000;
  bool quiet = false;
};

struct ReplayOptions {
  std::filesystem::path manifest;
  std::filesystem::path into;
  bool verify = false;
};

inline const std::vector<std::string> kMetricNames{"ise", "energy", "mmd", "tau", "ks"};

/// Each command returns the process exit status and fills `manifest` with what it
/// recorded (command and argv are filled by run()).
int cmd_generate(const GenerateOptions& o, RunManifest& manifest, std::ostream& out);
int cmd_train(const TrainOptions& o, RunManifest& manifest, std::ostream& out);
int cmd_sample(const SampleOptions& o, RunManifest& manifest, std::ostream& out);
int cmd_evaluate(const EvaluateOptions& o, RunManifest& manifest, std::ostream& out);
int cmd_benchmark(const BenchmarkOptions& o, RunManifest& manifest, std::ostream& out);
int cmd_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and dispatches. Errors are printed to
/// `err` and turned into a nonzero status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        RunManifest* written = nullptr);

// Benchmark suites, shared with tests.
struct SuiteRow {
  int repetition = 0;
  std::string group;  // family or toy dataset
  std::string spec;
  std::string candidate;
  std::string metric;
  double value = 0.0;
  std::string status = "ok";
};

std::vector<SuiteRow> run_bivariate_suite(const BenchmarkOptions& o, std::ostream& progress);
std::vector<SuiteRow> run_toys_suite(const BenchmarkOptions& o, std::ostream& progress);
std::string format_suite_rows(const std::vector<SuiteRow>& rows);
std::string format_suite_summary(const std::vector<SuiteRow>& rows);

}  // namespace igc::cli
