#include "igc/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "igc/losses.hpp"

namespace igc {

void TrainConfig::validate() const {
  for (int units : hidden_units) {
    if (units < 1) throw std::invalid_argument("hidden_units: every layer width must be >= 1");
  }
  if (noise_dim < 0) throw std::invalid_argument("noise_dim must be >= 0 (0 selects 3 * D)");
  if (model_samples < 2) throw std::invalid_argument("model_samples (M) must be >= 2");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw std::invalid_argument("beta1 must be in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw std::invalid_argument("beta2 must be in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw std::invalid_argument("adam_epsilon must be positive");
  if (cdf_knots < 2) throw std::invalid_argument("cdf_knots must be >= 2");
  if (marginal_samples < cdf_knots) {
    throw std::invalid_argument("marginal_samples (T) must be >= cdf_knots (G)");
  }
}

TrainedCopulaModel::TrainedCopulaModel(GeneratorParams params, std::vector<MarginalCdfTable> marginals,
                                       TrainConfig config, std::vector<EpochLoss> history)
    : params_(std::move(params)),
      marginals_(std::move(marginals)),
      config_(std::move(config)),
      history_(std::move(history)) {
  if (static_cast<int>(marginals_.size()) != params_.output_dim()) {
    throw std::invalid_argument("model: one marginal table per generator output is required");
  }
}

namespace {

std::uint64_t stream_seed(const TrainConfig& config, SeedStream stream) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(stream));
}

GeneratorParams initial_params(int dimension, const TrainConfig& config) {
  Rng rng(stream_seed(config, SeedStream::init));
  return GeneratorParams::glorot(config.resolved_noise_dim(dimension), config.hidden_units,
                                 dimension, rng);
}

}  // namespace

TrainedCopulaModel train(const Matrix& u, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const Index n = u.rows();
  const int dims = static_cast<int>(u.cols());
  if (dims < 2) {
    throw std::invalid_argument("train: data has D = " + std::to_string(dims) +
                                "; a copula needs at least 2 dimensions");
  }
  if (n < config.batch_size) {
    throw std::invalid_argument("train: N = " + std::to_string(n) + " is smaller than batch_size = " +
                                std::to_string(config.batch_size));
  }
  if (!is_unit_space(u)) throw std::invalid_argument("train: data must be pseudo-observations in (0, 1]");

  TrainConfig resolved = config;
  resolved.noise_dim = config.resolved_noise_dim(dims);
  const int k = resolved.noise_dim;
  const Index m = resolved.model_samples;

  GeneratorParams params = initial_params(dims, resolved);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  {
    Rng rng(stream_seed(resolved, SeedStream::shuffle));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  }
  const Index batches = n / resolved.batch_size;
  std::vector<Matrix> data_batches;
  std::vector<Matrix> noise;
  Rng noise_rng(stream_seed(resolved, SeedStream::batch_noise));
  for (Index b = 0; b < batches; ++b) {
    Matrix batch(resolved.batch_size, dims);
    for (Index r = 0; r < resolved.batch_size; ++r) {
      batch.row(r) = u.row(order[static_cast<std::size_t>(b * resolved.batch_size + r)]);
    }
    data_batches.push_back(std::move(batch));
    noise.push_back(normal_matrix(noise_rng, m, k));
  }
  Rng epoch_rng(stream_seed(resolved, SeedStream::epoch_noise));

  const SoftrankOptions rank_options{resolved.alpha, resolved.softrank_iqr_scaling};
  std::vector<EpochLoss> history;
  history.reserve(static_cast<std::size_t>(resolved.epochs));
  ForwardCache forward_cache;
  SoftrankCache rank_cache;

  for (int epoch = 1; epoch <= resolved.epochs; ++epoch) {
    double soft_sum = 0.0;
    double hard_sum = 0.0;
    for (Index b = 0; b < batches; ++b) {
      if (resolved.fresh_noise_per_epoch) noise[static_cast<std::size_t>(b)] = normal_matrix(epoch_rng, m, k);
      const Matrix y = mlp_forward(params, noise[static_cast<std::size_t>(b)], &forward_cache);
      if (!y.allFinite()) {
        throw NumericalError("train: generator output became non-finite at epoch " + std::to_string(epoch) +
                             ", batch " + std::to_string(b));
      }
      const Matrix v = softrank(y, rank_options, &rank_cache);
      const EnergyLoss loss = energy_loss(data_batches[static_cast<std::size_t>(b)], v);
      if (!std::isfinite(loss.value)) {
        throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(b));
      }
      soft_sum += loss.value;
      hard_sum += energy_loss(data_batches[static_cast<std::size_t>(b)], hard_rank(y)).value;

      const Matrix d_latent = softrank_backward(rank_cache, loss.gradient);
      const Gradients grads = mlp_backward(params, forward_cache, d_latent);
      if (!grads.all_finite()) {
        throw NumericalError("train: non-finite gradient at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(b));
      }
      adam_step(params, grads, resolved.adam);
    }
    const double count = static_cast<double>(batches);
    history.push_back(EpochLoss{epoch, soft_sum / count, hard_sum / count});
    if (on_epoch && !on_epoch(history.back())) break;
  }

  auto marginals = finalize_marginals(params, resolved);
  return TrainedCopulaModel(std::move(params), std::move(marginals), std::move(resolved), std::move(history));
}

std::vector<MarginalCdfTable> finalize_marginals(const GeneratorParams& params, const TrainConfig& config,
                                                 Index chunk_rows) {
  if (chunk_rows < 1) throw std::invalid_argument("finalize_marginals: chunk_rows must be >= 1");
  const std::int64_t total = config.marginal_samples;
  if (total < config.cdf_knots || config.cdf_knots < 2) {
    throw std::invalid_argument("finalize_marginals: need T >= G >= 2 (T=" + std::to_string(total) +
                                ", G=" + std::to_string(config.cdf_knots) + ")");
  }
  const int dims = params.output_dim();
  const int k = params.input_dim();
  Rng rng(stream_seed(config, SeedStream::finalize));
  std::vector<std::vector<double>> columns(static_cast<std::size_t>(dims));
  for (auto& c : columns) c.reserve(static_cast<std::size_t>(total));
  for (std::int64_t done = 0; done < total;) {
    const Index rows = static_cast<Index>(std::min<std::int64_t>(chunk_rows, total - done));
    const Matrix y = mlp_forward(params, normal_matrix(rng, rows, k));
    for (int d = 0; d < dims; ++d) {
      columns[static_cast<std::size_t>(d)].insert(columns[static_cast<std::size_t>(d)].end(),
                                                  y.col(d).data(), y.col(d).data() + rows);
    }
    done += rows;
  }
  std::vector<MarginalCdfTable> tables;
  tables.reserve(static_cast<std::size_t>(dims));
  for (int d = 0; d < dims; ++d) {
    tables.push_back(build_marginal_cdf_table(columns[static_cast<std::size_t>(d)], config.cdf_knots, d));
  }
  return tables;
}

TrainedCopulaModel untrained_model(int dimension, const TrainConfig& config) {
  config.validate();
  if (dimension < 2) throw std::invalid_argument("untrained_model: dimension must be >= 2");
  TrainConfig resolved = config;
  resolved.noise_dim = config.resolved_noise_dim(dimension);
  GeneratorParams params = initial_params(dimension, resolved);
  auto marginals = finalize_marginals(params, resolved);
  return TrainedCopulaModel(std::move(params), std::move(marginals), std::move(resolved), {});
}

namespace {

constexpr Index kSampleChunk = 16384;

template <typename Fn>
Matrix generate(const TrainedCopulaModel& model, Index n, std::uint64_t seed, Fn&& map_chunk) {
  if (n < 0) throw std::invalid_argument("sample count must be non-negative");
  Matrix out(n, model.dimension());
  Rng rng(seed);
  for (Index start = 0; start < n; start += kSampleChunk) {
    const Index rows = std::min(kSampleChunk, n - start);
    const Matrix y = mlp_forward(model.params(), normal_matrix(rng, rows, model.noise_dim()));
    out.middleRows(start, rows) = map_chunk(y);
  }
  return out;
}

}  // namespace

Matrix sample_latent(const TrainedCopulaModel& model, Index n, std::uint64_t seed) {
  return generate(model, n, seed, [](const Matrix& y) { return y; });
}

Matrix sample_copula(const TrainedCopulaModel& model, Index n, std::uint64_t seed) {
  return generate(model, n, seed, [&model](const Matrix& y) {
    Matrix v(y.rows(), y.cols());
    for (Index d = 0; d < y.cols(); ++d) {
      const auto& table = model.marginals()[static_cast<std::size_t>(d)];
      for (Index i = 0; i < y.rows(); ++i) v(i, d) = cdf_eval(table, y(i, d));
    }
    return v;
  });
}

Matrix apply_inverses(const Matrix& units, const std::vector<InverseCdf>& inverses) {
  if (static_cast<Index>(inverses.size()) != units.cols()) {
    throw std::invalid_argument("need one inverse CDF per dimension (got " + std::to_string(inverses.size()) +
                                " for D = " + std::to_string(units.cols()) + ")");
  }
  Matrix out(units.rows(), units.cols());
  for (Index d = 0; d < units.cols(); ++d) {
    const auto& inv = inverses[static_cast<std::size_t>(d)];
    for (Index i = 0; i < units.rows(); ++i) out(i, d) = inv(units(i, d));
  }
  return out;
}

Matrix sample_data_space(const TrainedCopulaModel& model, const std::vector<InverseCdf>& inverses, Index n,
                         std::uint64_t seed) {
  if (static_cast<int>(inverses.size()) != model.dimension()) {
    throw std::invalid_argument("sample_data_space: need one inverse CDF per model dimension");
  }
  return apply_inverses(sample_copula(model, n, seed), inverses);
}

std::vector<InverseCdf> empirical_inverses(const Matrix& training_data) {
  std::vector<InverseCdf> out;
  for (auto& cdf : empirical_marginals(training_data)) {
    out.emplace_back([cdf = std::move(cdf)](double u) { return cdf.inverse(u); });
  }
  return out;
}

}  // namespace igc
