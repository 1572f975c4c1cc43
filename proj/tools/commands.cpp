#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "igc/igc.hpp"
#include "igc/io.hpp"

namespace igc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string absolute_string(const fs::path& p) { return fs::absolute(p).lexically_normal().string(); }

fs::path sibling(const fs::path& out, const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix);
}

Matrix to_unit_space(const Matrix& x, RunManifest& manifest, const std::string& what) {
  if (is_unit_space(x)) return x;
  manifest.notes.push_back(what + " not in (0,1]; converted to pseudo-observations");
  return pseudo_observations(x);
}

Matrix strided_rows(const Matrix& x, Index cap) {
  if (x.rows() <= cap) return x;
  Matrix out(cap, x.cols());
  for (Index i = 0; i < cap; ++i) out.row(i) = x.row(i * x.rows() / cap);
  return out;
}

std::vector<double> column(const Matrix& x, Index c) {
  return std::vector<double>(x.col(c).data(), x.col(c).data() + x.rows());
}

bool is_toy_name(const std::string& name) { return name == "swiss_roll" || name == "ring" || name == "grid"; }

void write_report_csv(const fs::path& path, const std::vector<MetricReport>& rows) {
  std::string text = "candidate,metric,value,data_size,model_size,configuration,seed\n";
  for (const auto& r : rows) {
    text += r.candidate + "," + r.metric + "," + format_double(r.value) + "," + std::to_string(r.data_size) + "," +
            std::to_string(r.model_size) + "," + r.configuration + "," + std::to_string(r.seed) + "\n";
  }
  write_file_atomically(path, text);
}

void print_report(const std::vector<MetricReport>& rows, std::ostream& out) {
  out << std::left << std::setw(14) << "candidate" << std::setw(12) << "metric" << std::right << std::setw(16)
      << "value" << "  configuration\n";
  for (const auto& r : rows) {
    std::ostringstream v;
    v << std::setprecision(6) << r.value;
    out << std::left << std::setw(14) << r.candidate << std::setw(12) << r.metric << std::right << std::setw(16)
        << v.str() << "  " << r.configuration << "\n";
  }
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_generate(const GenerateOptions& o, RunManifest& manifest, std::ostream& out) {
  if (o.out.empty()) throw std::invalid_argument("--out is required");
  if (o.n < 1) throw std::invalid_argument("n must be >= 1");
  manifest.seeds["seed"] = o.seed;
  manifest.config["family"] = o.family;
  manifest.config["n"] = o.n;
  manifest.outputs["--out"] = absolute_string(o.out);

  if (is_toy_name(o.family)) {
    const Matrix x = sample_toy2d(toy2d_from_string(o.family), o.n, o.seed);
    write_csv(o.out, column_names("x", 2), x);
    out << "wrote " << x.rows() << " rows of toy dataset " << o.family << " to " << o.out.string() << "\n";
    return 0;
  }

  const CopulaFamily family = copula_family_from_string(o.family);
  CopulaSpec spec;
  if (o.random_params) {
    Rng rng(derive_seed(o.seed, 1));
    spec = random_bivariate_benchmark(family, rng);
  } else {
    spec.family = family;
    spec.dimension = o.dimension;
    spec.rotation = rotation_from_degrees(o.rotation);
    if (family == CopulaFamily::gaussian || family == CopulaFamily::student_t) {
      if (!(o.rho > -1.0 && o.rho < 1.0)) throw std::invalid_argument("rho must lie in (-1, 1)");
      spec.correlation = equicorrelation(o.dimension, o.rho);
    }
    spec.dof = o.nu;
    spec.theta = o.theta;
    if (family == CopulaFamily::gaussian_mixture) {
      Rng rng(derive_seed(o.seed, 1));
      spec.mixture = random_gaussian_mixture_spec(rng);
    }
  }
  spec.validate();
  manifest.config["spec"] = spec.describe();

  Matrix u;
  if (spec.family == CopulaFamily::gaussian_mixture) {
    MixtureSample s = sample_gaussian_mixture_copula(spec.mixture, o.n, o.seed);
    const fs::path xpath = o.out_x.empty() ? sibling(o.out, "_x.csv") : o.out_x;
    write_csv(xpath, column_names("x", 2), s.data);
    manifest.outputs["--out-x"] = absolute_string(xpath);
    out << "wrote data-space sample to " << xpath.string() << "\n";
    u = std::move(s.units);
  } else {
    u = sample_copula_spec(spec, o.n, o.seed);
  }
  write_csv(o.out, column_names("u", u.cols()), u);
  out << "wrote " << u.rows() << " x " << u.cols() << " sample of " << spec.describe() << " to " << o.out.string()
      << "\n";
  return 0;
}

int cmd_train(const TrainOptions& o, RunManifest& manifest, std::ostream& out) {
  if (o.data.empty() || o.out.empty()) throw std::invalid_argument("--data and --out are required");
  TrainConfig config;
  if (!o.config_file.empty()) {
    apply_key_values(config, read_key_values(o.config_file));
    manifest.inputs["--config"] = absolute_string(o.config_file);
  }
  for (const auto& kv : o.overrides) apply_key_values(config, parse_key_values(kv));
  config.validate();

  CsvTable table = read_csv(o.data);
  manifest.inputs["--data"] = absolute_string(o.data);
  if (table.values.cols() < 2) {
    throw std::invalid_argument("data has a single column; a copula needs D >= 2 dimensions");
  }
  Matrix x = std::move(table.values);

  if (o.train_frac < 1.0) {
    if (!(o.train_frac > 0.0)) throw std::invalid_argument("--train-frac must lie in (0, 1]");
    std::vector<Index> order(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng(o.split_seed);
    for (Index i = x.rows() - 1; i > 0; --i) {
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(i + 1)))]);
    }
    const Index n_train = std::max<Index>(1, static_cast<Index>(std::llround(o.train_frac * static_cast<double>(x.rows()))));
    Matrix train_rows(n_train, x.cols());
    Matrix holdout(x.rows() - n_train, x.cols());
    for (Index i = 0; i < x.rows(); ++i) {
      const Index src = order[static_cast<std::size_t>(i)];
      if (i < n_train) train_rows.row(i) = x.row(src);
      else holdout.row(i - n_train) = x.row(src);
    }
    const fs::path hpath = o.holdout_out.empty() ? sibling(o.out, "_holdout.csv") : o.holdout_out;
    write_csv(hpath, table.header, holdout);
    const fs::path tpath = sibling(o.out, "_train.csv");
    write_csv(tpath, table.header, train_rows);
    manifest.outputs["train_split"] = absolute_string(tpath);
    manifest.outputs[o.holdout_out.empty() ? "holdout" : "--holdout-out"] = absolute_string(hpath);
    manifest.seeds["split_seed"] = o.split_seed;
    manifest.config["train_frac"] = o.train_frac;
    x = std::move(train_rows);
  }

  const Matrix u = to_unit_space(x, manifest, "training data");
  const int every = std::max(1, config.epochs / 10);
  auto progress = [&](const EpochLoss& e) {
    if (!o.quiet && (e.epoch == 1 || e.epoch % every == 0)) {
      out << "epoch " << e.epoch << "  loss " << std::setprecision(8) << e.softrank_loss << "  hard-rank loss "
          << e.hard_rank_loss << "\n";
    }
    return true;
  };
  const TrainedCopulaModel model = train(u, config, progress);

  save_model(model, o.out);
  const fs::path loss_path = o.loss_out.empty() ? sibling(o.out, "_loss.csv") : o.loss_out;
  Matrix losses(static_cast<Index>(model.loss_history().size()), 3);
  for (std::size_t i = 0; i < model.loss_history().size(); ++i) {
    const auto& e = model.loss_history()[i];
    losses.row(static_cast<Index>(i)) << e.epoch, e.softrank_loss, e.hard_rank_loss;
  }
  write_csv(loss_path, {"epoch", "softrank_loss", "hard_rank_loss"}, losses);

  manifest.config["train"] = to_key_values(model.config());
  manifest.config["rows"] = u.rows();
  manifest.config["dimension"] = u.cols();
  manifest.seeds["seed"] = model.config().seed;
  manifest.outputs["--out"] = absolute_string(o.out);
  manifest.outputs[o.loss_out.empty() ? "loss" : "--loss-out"] = absolute_string(loss_path);
  out << "trained on " << u.rows() << " x " << u.cols() << " data; model written to " << o.out.string() << "\n";
  return 0;
}

int cmd_sample(const SampleOptions& o, RunManifest& manifest, std::ostream& out) {
  if (o.model.empty() || o.out.empty()) throw std::invalid_argument("--model and --out are required");
  if (o.n < 0) throw std::invalid_argument("n must be >= 0");
  const TrainedCopulaModel model = load_model(o.model);
  manifest.inputs["--model"] = absolute_string(o.model);
  manifest.seeds["seed"] = o.seed;
  manifest.config["n"] = o.n;

  if (!o.marginals.empty()) {
    const CsvTable table = read_csv(o.marginals);
    if (table.values.cols() != model.dimension()) {
      throw std::invalid_argument("marginals file has " + std::to_string(table.values.cols()) +
                                  " columns but the model has dimension " + std::to_string(model.dimension()));
    }
    manifest.inputs["--marginals"] = absolute_string(o.marginals);
    const Matrix s = sample_data_space(model, empirical_inverses(table.values), o.n, o.seed);
    write_csv(o.out, table.header, s);
  } else {
    const Matrix v = sample_copula(model, o.n, o.seed);
    write_csv(o.out, column_names("u", model.dimension()), v);
  }
  manifest.outputs["--out"] = absolute_string(o.out);
  out << "wrote " << o.n << " samples to " << o.out.string() << "\n";
  return 0;
}

int cmd_evaluate(const EvaluateOptions& o, RunManifest& manifest, std::ostream& out) {
  if (o.data.empty()) throw std::invalid_argument("--data is required");
  for (const auto& m : o.metrics) {
    if (std::find(kMetricNames.begin(), kMetricNames.end(), m) == kMetricNames.end()) {
      std::string valid;
      for (const auto& v : kMetricNames) valid += (valid.empty() ? "" : ", ") + v;
      throw std::invalid_argument("unknown metric '" + m + "' (valid metrics: " + valid + ")");
    }
  }
  const Matrix data = to_unit_space(read_csv(o.data).values, manifest, "evaluation data");
  manifest.inputs["--data"] = absolute_string(o.data);
  manifest.seeds["seed"] = o.seed;

  std::vector<std::pair<std::string, Matrix>> candidates;
  auto check_dim = [&](const Matrix& m, const std::string& name) {
    if (m.cols() != data.cols()) {
      throw std::invalid_argument(name + " has dimension " + std::to_string(m.cols()) + " but the data has " +
                                  std::to_string(data.cols()));
    }
  };
  if (!o.model.empty()) {
    const TrainedCopulaModel model = load_model(o.model);
    manifest.inputs["--model"] = absolute_string(o.model);
    Matrix v = sample_copula(model, o.model_samples, derive_seed(o.seed, 1));
    check_dim(v, "model");
    candidates.emplace_back("igc", std::move(v));
  }
  if (!o.samples.empty()) {
    Matrix v = read_csv(o.samples).values;
    check_dim(v, "samples file");
    if (!((v.array() >= 0.0).all() && (v.array() <= 1.0).all())) {
      throw std::invalid_argument("samples file must contain copula samples in [0,1]");
    }
    manifest.inputs["--samples"] = absolute_string(o.samples);
    candidates.emplace_back("samples", std::move(v));
  }
  Matrix fit_data = data;
  if (!o.fit_data.empty() && !o.baselines.empty()) {
    fit_data = to_unit_space(read_csv(o.fit_data).values, manifest, "baseline fit data");
    check_dim(fit_data, "baseline fit data");
    manifest.inputs["--fit-data"] = absolute_string(o.fit_data);
  }
  for (const auto& b : o.baselines) {
    if (b == "gaussian") {
      candidates.emplace_back("gaussian",
                              sample_baseline(fit_gaussian_copula(fit_data), o.model_samples, derive_seed(o.seed, 2)));
    } else if (b == "independence") {
      candidates.emplace_back("independence",
                              sample_independence_baseline(static_cast<int>(data.cols()), o.model_samples, derive_seed(o.seed, 3)));
    } else {
      throw std::invalid_argument("unknown baseline '" + b + "' (valid baselines: gaussian, independence)");
    }
  }
  if (candidates.empty()) throw std::invalid_argument("nothing to evaluate: give --model, --samples or --baseline");

  auto has = [&](const char* m) { return std::find(o.metrics.begin(), o.metrics.end(), m) != o.metrics.end(); };
  std::vector<MetricReport> rows;
  const Matrix data_pairs = strided_rows(data, o.pair_cap);
  auto push = [&](const std::string& cand, const std::string& metric, double value, Index model_size,
                  const std::string& configuration) {
    rows.push_back(MetricReport{cand, metric, value, data.rows(), model_size, configuration, o.seed});
  };

  if (has("tau")) {
    const Matrix t = kendall_tau_matrix(data);
    for (Index i = 0; i < t.rows(); ++i)
      for (Index j = i + 1; j < t.cols(); ++j)
        push("data", "tau[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]", t(i, j), 0, "kendall tau-a");
  }
  for (const auto& [name, v] : candidates) {
    if (has("ise")) {
      IseOptions opts;
      opts.allow_high_dimension = o.force;
      double value = 0.0;
      try {
        value = ise(data, v, nullptr, opts);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(e.what()) + "; pass --force to compute ISE anyway");
      }
      push(name, "ise", value, v.rows(), "reference=empirical copula of data");
    }
    const Matrix v_pairs = strided_rows(v, o.pair_cap);
    if (has("energy")) {
      push(name, "energy", energy_distance(data_pairs, v_pairs), v_pairs.rows(),
           "v-statistic;pairs<=" + std::to_string(o.pair_cap));
    }
    if (has("mmd")) {
      const double sigma = o.bandwidth ? *o.bandwidth : median_heuristic(data_pairs, v_pairs);
      push(name, "mmd", mmd_gaussian(data_pairs, v_pairs, sigma), v_pairs.rows(),
           std::string("sigma=") + format_double(sigma) + (o.bandwidth ? ";fixed" : ";median heuristic"));
    }
    if (has("tau")) {
      const Matrix t = kendall_tau_matrix(v);
      for (Index i = 0; i < t.rows(); ++i)
        for (Index j = i + 1; j < t.cols(); ++j)
          push(name, "tau[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]", t(i, j), v.rows(),
               "kendall tau-a");
    }
    if (has("ks")) {
      for (Index d = 0; d < v.cols(); ++d) {
        push(name, "ks[" + std::to_string(d + 1) + "]", ks_uniform(column(v, d)), v.rows(), "vs U(0;1)");
      }
    }
  }

  manifest.config["metrics"] = o.metrics;
  manifest.config["model_samples"] = o.model_samples;
  manifest.config["pair_cap"] = o.pair_cap;
  manifest.config["force"] = o.force;
  if (o.bandwidth) manifest.config["bandwidth"] = *o.bandwidth;
  print_report(rows, out);
  if (!o.out.empty()) {
    write_report_csv(o.out, rows);
    manifest.outputs["--out"] = absolute_string(o.out);
  }
  return 0;
}

int cmd_benchmark(const BenchmarkOptions& o, RunManifest& manifest, std::ostream& out) {
  if (o.repetitions < 1) throw std::invalid_argument("--reps must be >= 1");
  if (o.threads < 1) throw std::invalid_argument("--threads must be >= 1");
  std::vector<SuiteRow> rows;
  if (o.suite == "bivariate") {
    rows = run_bivariate_suite(o, out);
  } else if (o.suite == "toys") {
    rows = run_toys_suite(o, out);
  } else {
    throw std::invalid_argument("unknown suite '" + o.suite + "' (valid suites: bivariate, toys)");
  }
  fs::create_directories(o.out_dir);
  const fs::path results = o.out_dir / "results.csv";
  const fs::path summary = o.out_dir / "summary.csv";
  write_file_atomically(results, format_suite_rows(rows));
  const std::string summary_text = format_suite_summary(rows);
  write_file_atomically(summary, summary_text);

  manifest.seeds["seed"] = o.seed;
  manifest.config["suite"] = o.suite;
  manifest.config["repetitions"] = o.repetitions;
  manifest.config["epochs"] = o.epochs;
  manifest.config["model_samples"] = o.model_samples;
  manifest.config["marginal_samples"] = o.marginal_samples;
  manifest.config["threads"] = o.threads;
  if (o.suite == "bivariate") manifest.config["families"] = o.families;
  manifest.outputs["--out-dir"] = absolute_string(o.out_dir);
  manifest.outputs["results"] = absolute_string(results);
  manifest.outputs["summary"] = absolute_string(summary);

  out << summary_text;
  const auto failures = std::count_if(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.status != "ok"; });
  if (failures > 0) {
    out << failures << " result(s) failed; see " << results.string() << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int cmd_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err) {
  const RunManifest recorded = read_manifest(o.manifest);
  if (recorded.command == "replay") throw std::invalid_argument("cannot replay a replay");

  std::map<std::string, std::string> originals;
  if (o.verify) {
    for (const auto& [label, path] : recorded.outputs) {
      if (fs::is_regular_file(path)) originals[label] = read_bytes(path);
    }
  }

  std::vector<std::string> args = recorded.argv;
  if (!o.into.empty()) {
    fs::create_directories(o.into);
    const fs::path into = fs::absolute(o.into);
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--out-dir") {
        args[i + 1] = into.string();
      } else if (recorded.outputs.count(args[i])) {
        args[i + 1] = (into / fs::path(args[i + 1]).filename()).string();
      }
    }
  }

  const fs::path cwd = fs::current_path();
  fs::current_path(recorded.working_directory);
  RunManifest written;
  int status = 0;
  try {
    status = run(args, out, err, &written);
  } catch (...) {
    fs::current_path(cwd);
    throw;
  }
  fs::current_path(cwd);
  if (status != 0) return status;

  if (o.verify) {
    int mismatches = 0;
    for (const auto& [label, bytes] : originals) {
      const auto it = written.outputs.find(label);
      if (it == written.outputs.end() || !fs::is_regular_file(it->second)) {
        err << "replay: output '" << label << "' was not produced\n";
        ++mismatches;
      } else if (read_bytes(it->second) != bytes) {
        err << "replay: output '" << label << "' differs (" << it->second << ")\n";
        ++mismatches;
      } else {
        out << "identical: " << it->second << "\n";
      }
    }
    if (mismatches > 0) return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, RunManifest* written) {
  CLI::App app{"Implicit generative copulas: generate, train, sample, evaluate, benchmark", "igc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Draw a synthetic copula sample or toy dataset and write it as CSV");
  g->add_option("--family", gen.family,
                "independence | gaussian | student_t | clayton | gumbel | gaussian_mixture | swiss_roll | ring | grid")
      ->capture_default_str();
  g->add_option("--theta", gen.theta, "Clayton/Gumbel parameter")->capture_default_str();
  g->add_option("--rho", gen.rho, "Equicorrelation for gaussian/student_t")->capture_default_str();
  g->add_option("--nu", gen.nu, "Student-t degrees of freedom")->capture_default_str();
  g->add_option("--rotation", gen.rotation, "Rotation in degrees (0, 90, 180, 270)")->capture_default_str();
  g->add_option("--dim", gen.dimension, "Dimension for independence/gaussian/student_t")->capture_default_str();
  g->add_flag("--random-params", gen.random_params, "Draw parameters from the benchmark ranges");
  g->add_option("--n", gen.n, "Number of rows")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output CSV")->required();
  g->add_option("--out-x", gen.out_x, "Data-space CSV for gaussian_mixture (default <out>_x.csv)");

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train an IGC model on a CSV of observations");
  t->add_option("--data", tr.data, "Training CSV (pseudo-observations are computed if needed)")->required();
  t->add_option("--config", tr.config_file, "key = value config file");
  t->add_option("--out", tr.out, "Model archive to write")->required();
  t->add_option("--loss-out", tr.loss_out, "Loss history CSV (default <out>_loss.csv)");
  t->add_option("--set", tr.overrides, "Config override key=value (repeatable)");
  auto forward = [&](const char* key) {
    return [&tr, key](const std::string& v) { tr.overrides.push_back(std::string(key) + "=" + v); };
  };
  t->add_option_function<std::string>("--epochs", forward("epochs"), "Override epochs");
  t->add_option_function<std::string>("--seed", forward("seed"), "Override master seed");
  t->add_option_function<std::string>("--alpha", forward("alpha"), "Override softrank sharpness");
  t->add_option_function<std::string>("--batch-size", forward("batch_size"), "Override N_batch");
  t->add_option_function<std::string>("--model-samples", forward("model_samples"), "Override M");
  t->add_option_function<std::string>("--marginal-samples", forward("marginal_samples"), "Override T");
  t->add_option_function<std::string>("--cdf-knots", forward("cdf_knots"), "Override G");
  t->add_option("--train-frac", tr.train_frac, "Fraction of rows used for training; both splits are written next to --out")
      ->capture_default_str();
  t->add_option("--split-seed", tr.split_seed, "Seed of the train/holdout split")->capture_default_str();
  t->add_option("--holdout-out", tr.holdout_out, "Holdout CSV (default <out>_holdout.csv)");
  t->add_flag("--quiet", tr.quiet, "No per-epoch progress");

  SampleOptions sa;
  auto* s = app.add_subcommand("sample", "Draw samples from a trained model");
  s->add_option("--model", sa.model, "Model archive")->required();
  s->add_option("--n", sa.n, "Number of samples")->capture_default_str();
  s->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  s->add_option("--out", sa.out, "Output CSV")->required();
  s->add_option("--marginals", sa.marginals, "Training CSV whose empirical marginals map samples to data space");

  EvaluateOptions ev;
  auto* e = app.add_subcommand("evaluate", "Score a model, a sample file or baselines against data");
  e->add_option("--data", ev.data, "Data CSV")->required();
  e->add_option("--model", ev.model, "Model archive");
  e->add_option("--samples", ev.samples, "CSV of copula samples");
  e->add_option("--baseline", ev.baselines, "gaussian and/or independence")->delimiter(',');
  e->add_option("--fit-data", ev.fit_data, "CSV the baselines are fit on (default --data)");
  e->add_option("--metrics", ev.metrics, "Comma-separated: ise,energy,mmd,tau,ks")->delimiter(',');
  e->add_option("--n-model", ev.model_samples, "Samples drawn from models and baselines")->capture_default_str();
  e->add_option("--pair-cap", ev.pair_cap, "Max rows per side for energy/mmd")->capture_default_str();
  e->add_option_function<double>("--bandwidth", [&ev](double v) { ev.bandwidth = v; }, "Fixed MMD bandwidth");
  e->add_flag("--force", ev.force, "Allow ISE for D > 5");
  e->add_option("--seed", ev.seed, "Random seed")->capture_default_str();
  e->add_option("--out", ev.out, "Report CSV");

  BenchmarkOptions be;
  auto* b = app.add_subcommand("benchmark", "Run the repeated bivariate or toy-data benchmark");
  b->add_option("--suite", be.suite, "bivariate | toys")->capture_default_str();
  b->add_option("--reps", be.repetitions, "Repetitions")->capture_default_str();
  b->add_option("--seed", be.seed, "Master seed")->capture_default_str();
  b->add_option("--out-dir", be.out_dir, "Output directory")->capture_default_str();
  b->add_option("--threads", be.threads, "Worker threads")->capture_default_str();
  b->add_option("--epochs", be.epochs, "Training epochs per model")->capture_default_str();
  b->add_option("--families", be.families, "Families for the bivariate suite")->delimiter(',');
  b->add_option("--n-model", be.model_samples, "Model samples per ISE evaluation")->capture_default_str();
  b->add_option("--marginal-samples", be.marginal_samples, "Marginal-freeze sample count T")->capture_default_str();
  b->add_flag("--quiet", be.quiet, "No progress lines");

  ReplayOptions re;
  auto* r = app.add_subcommand("replay", "Re-run a command from its manifest");
  r->add_option("--manifest", re.manifest, "Manifest JSON")->required();
  r->add_option("--into", re.into, "Redirect outputs into this directory");
  r->add_flag("--verify", re.verify, "Compare outputs byte-for-byte with the recorded ones");

  std::vector<std::string> storage{"igc"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err);
  }

  RunManifest manifest;
  manifest.argv = args;
  manifest.working_directory = fs::current_path().string();
  const Stopwatch watch;
  try {
    int status = 0;
    fs::path manifest_file;
    if (*g) {
      manifest.command = "generate";
      status = cmd_generate(gen, manifest, out);
      manifest_file = manifest_path_for(gen.out);
    } else if (*t) {
      manifest.command = "train";
      status = cmd_train(tr, manifest, out);
      manifest_file = manifest_path_for(tr.out);
    } else if (*s) {
      manifest.command = "sample";
      status = cmd_sample(sa, manifest, out);
      manifest_file = manifest_path_for(sa.out);
    } else if (*e) {
      manifest.command = "evaluate";
      status = cmd_evaluate(ev, manifest, out);
      if (!ev.out.empty()) manifest_file = manifest_path_for(ev.out);
    } else if (*b) {
      manifest.command = "benchmark";
      status = cmd_benchmark(be, manifest, out);
      manifest_file = be.out_dir / "manifest.json";
    } else {
      manifest.command = "replay";
      return cmd_replay(re, out, err);
    }
    manifest.duration_seconds = watch.seconds();
    if (!manifest_file.empty()) write_manifest(manifest, manifest_file);
    if (written) *written = manifest;
    return status;
  } catch (const std::exception& ex) {
    err << "igc " << manifest.command << ": error: " << ex.what() << "\n";
    return 2;
  }
}

}  // namespace igc::cli
