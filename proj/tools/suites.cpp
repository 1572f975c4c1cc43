#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "commands.hpp"
#include "igc/igc.hpp"
#include "igc/io.hpp"

namespace igc::cli {

namespace {

double tau12(const Matrix& x) {
  return kendall_tau(std::span<const double>(x.col(0).data(), static_cast<std::size_t>(x.rows())),
                     std::span<const double>(x.col(1).data(), static_cast<std::size_t>(x.rows())));
}

// Runs task(i) for i in [0, count) on `threads` workers. Each task writes only its
// own result slot, so the output order never depends on scheduling.
template <typename Task>
void parallel_for(std::size_t count, int threads, Task task) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) task(i);
  };
  const int extra = std::min<int>(threads, static_cast<int>(count)) - 1;
  std::vector<std::thread> pool;
  for (int k = 0; k < extra; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

struct Task {
  int repetition;
  std::string group;
  std::uint64_t seed;
};

std::vector<SuiteRow> run_tasks(const std::vector<Task>& tasks, const BenchmarkOptions& o, std::ostream& progress,
                                const std::function<std::vector<SuiteRow>(const Task&)>& body) {
  std::vector<std::vector<SuiteRow>> slots(tasks.size());
  std::mutex log_mutex;
  parallel_for(tasks.size(), o.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    try {
      slots[i] = body(task);
    } catch (const std::exception& e) {
      SuiteRow failed;
      failed.repetition = task.repetition;
      failed.group = task.group;
      failed.candidate = "-";
      failed.metric = "-";
      failed.value = std::nan("");
      failed.status = std::string("error: ") + e.what();
      slots[i] = {failed};
    }
    if (!o.quiet) {
      std::lock_guard lock(log_mutex);
      progress << "[" << task.group << " rep " << task.repetition << "] "
               << (slots[i].size() == 1 && slots[i][0].status != "ok" ? slots[i][0].status : "done") << std::endl;
    }
  });
  std::vector<SuiteRow> rows;
  for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  return rows;
}

TrainConfig suite_config(const BenchmarkOptions& o, std::uint64_t seed) {
  TrainConfig config;
  config.epochs = o.epochs;
  config.seed = seed;
  config.marginal_samples = o.marginal_samples;
  config.cdf_knots = static_cast<int>(std::min<std::int64_t>(config.cdf_knots, o.marginal_samples));
  return config;
}

}  // namespace

std::vector<SuiteRow> run_bivariate_suite(const BenchmarkOptions& o, std::ostream& progress) {
  std::vector<CopulaFamily> families;
  for (const auto& name : o.families) families.push_back(copula_family_from_string(name));

  // Repetition-major so results are grouped by repetition index.
  std::vector<Task> tasks;
  for (int rep = 0; rep < o.repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(o.seed, static_cast<std::uint64_t>(rep));
    for (auto f : families) {
      tasks.push_back({rep, to_string(f), derive_seed(rep_seed, 100 + static_cast<std::uint64_t>(f))});
    }
  }

  auto body = [&](const Task& task) {
    const CopulaFamily family = copula_family_from_string(task.group);
    Rng spec_rng(derive_seed(task.seed, 1));
    const CopulaSpec spec = random_bivariate_benchmark(family, spec_rng);
    const Matrix u = sample_copula_spec(spec, 1000, derive_seed(task.seed, 2));

    CopulaCdf reference;
    if (auto analytic = analytic_copula_cdf(spec)) {
      reference = *analytic;
    } else {
      auto truth = std::make_shared<Matrix>(sample_copula_spec(spec, 100000, derive_seed(task.seed, 4)));
      reference = [truth](std::span<const double> w) { return empirical_copula_cdf(*truth, w); };
    }

    const TrainedCopulaModel model = train(u, suite_config(o, derive_seed(task.seed, 3)));
    std::vector<std::pair<std::string, Matrix>> candidates;
    candidates.emplace_back("igc", sample_copula(model, o.model_samples, derive_seed(task.seed, 5)));
    candidates.emplace_back("gaussian",
                            sample_baseline(fit_gaussian_copula(u), o.model_samples, derive_seed(task.seed, 6)));
    candidates.emplace_back("independence", sample_independence_baseline(2, o.model_samples, derive_seed(task.seed, 7)));

    std::vector<SuiteRow> rows;
    const std::string described = spec.describe();
    rows.push_back({task.repetition, task.group, described, "data", "tau", tau12(u), "ok"});
    for (const auto& [name, v] : candidates) {
      rows.push_back({task.repetition, task.group, described, name, "ise", ise(u, v, reference), "ok"});
      rows.push_back({task.repetition, task.group, described, name, "tau", tau12(v), "ok"});
    }
    return rows;
  };
  return run_tasks(tasks, o, progress, body);
}

std::vector<SuiteRow> run_toys_suite(const BenchmarkOptions& o, std::ostream& progress) {
  const Toy2d kinds[] = {Toy2d::swiss_roll, Toy2d::ring, Toy2d::grid};
  std::vector<Task> tasks;
  for (int rep = 0; rep < o.repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(o.seed, static_cast<std::uint64_t>(rep));
    for (auto k : kinds) tasks.push_back({rep, to_string(k), derive_seed(rep_seed, 200 + static_cast<std::uint64_t>(k))});
  }

  constexpr Index n = 5000;
  auto body = [&](const Task& task) {
    const Toy2d kind = toy2d_from_string(task.group);
    const Matrix train_x = sample_toy2d(kind, n, derive_seed(task.seed, 1));
    const Matrix test_x = sample_toy2d(kind, n, derive_seed(task.seed, 2));
    const Matrix u = pseudo_observations(train_x);
    const auto inverses = empirical_inverses(train_x);

    const TrainedCopulaModel model = train(u, suite_config(o, derive_seed(task.seed, 3)));
    std::vector<std::pair<std::string, Matrix>> candidates;
    candidates.emplace_back("train_data", train_x);
    candidates.emplace_back("igc", sample_data_space(model, inverses, n, derive_seed(task.seed, 4)));
    candidates.emplace_back("gaussian",
                            apply_inverses(sample_baseline(fit_gaussian_copula(u), n, derive_seed(task.seed, 5)), inverses));
    candidates.emplace_back("independence",
                            apply_inverses(sample_independence_baseline(2, n, derive_seed(task.seed, 6)), inverses));

    std::vector<SuiteRow> rows;
    for (const auto& [name, x] : candidates) {
      rows.push_back({task.repetition, task.group, "n=5000", name, "kde_nll", kde_nll(x, test_x), "ok"});
    }
    return rows;
  };
  return run_tasks(tasks, o, progress, body);
}

std::string format_suite_rows(const std::vector<SuiteRow>& rows) {
  std::string text = "repetition,group,spec,candidate,metric,value,status\n";
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    text += std::to_string(r.repetition) + "," + r.group + "," + r.spec + "," + r.candidate + "," + r.metric + "," +
            format_double(r.value) + "," + status + "\n";
  }
  return text;
}

std::string format_suite_summary(const std::vector<SuiteRow>& rows) {
  // Keyed by first appearance so the table follows the run order.
  std::vector<std::tuple<std::string, std::string, std::string>> keys;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> values;
  std::map<std::string, int> failures;
  for (const auto& r : rows) {
    if (r.status != "ok") {
      ++failures[r.group];
      continue;
    }
    auto key = std::make_tuple(r.group, r.candidate, r.metric);
    if (!values.count(key)) keys.push_back(key);
    values[key].push_back(r.value);
  }
  std::string text = "group,candidate,metric,count,mean,median,std,failed_repetitions\n";
  for (const auto& key : keys) {
    auto v = values[key];
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    const double median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    text += std::get<0>(key) + "," + std::get<1>(key) + "," + std::get<2>(key) + "," + std::to_string(v.size()) +
            "," + format_double(mean) + "," + format_double(median) + "," + format_double(sd) + "," +
            std::to_string(failures[std::get<0>(key)]) + "\n";
  }
  for (const auto& [group, count] : failures) {
    if (std::none_of(keys.begin(), keys.end(), [&](const auto& k) { return std::get<0>(k) == group; })) {
      text += group + ",-,-,0,nan,nan,nan," + std::to_string(count) + "\n";
    }
  }
  return text;
}

}  // namespace igc::cli
