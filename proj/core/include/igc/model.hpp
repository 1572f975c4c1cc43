#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "igc/mlp.hpp"
#include "igc/transforms.hpp"
#include "igc/types.hpp"

namespace igc {

/// Training hyperparameters. Field names double as config-file keys.
struct TrainConfig {
  std::vector<int> hidden_units{100, 100};
  int noise_dim = 0;         // K; 0 means 3 * D
  int model_samples = 200;   // M
  int batch_size = 100;      // N_batch
  int epochs = 500;
  double alpha = 1000.0;
  bool softrank_iqr_scaling = true;
  AdamHyper adam;
  std::int64_t marginal_samples = 1'000'000;  // T
  int cdf_knots = 4096;                       // G
  std::uint64_t seed = 0;
  bool fresh_noise_per_epoch = false;

  int resolved_noise_dim(int dimension) const { return noise_dim > 0 ? noise_dim : 3 * dimension; }
  /// Throws std::invalid_argument naming the first invalid field.
  void validate() const;
};

/// Mean training loss of one epoch: on softrank outputs (optimized) and on
/// hard ranks of the same generator outputs (monitoring only).
struct EpochLoss {
  int epoch = 0;
  double softrank_loss = 0.0;
  double hard_rank_loss = 0.0;
};

/// Sub-stream ids for derive_seed(config.seed, ...).
enum class SeedStream : std::uint64_t { init = 1, shuffle = 2, batch_noise = 3, finalize = 4, epoch_noise = 5 };

/// Trained generator with frozen latent marginals. Immutable.
class TrainedCopulaModel {
 public:
  static constexpr const char* kInitScheme = "glorot_uniform;bias=zero";

  TrainedCopulaModel(GeneratorParams params, std::vector<MarginalCdfTable> marginals,
                     TrainConfig config, std::vector<EpochLoss> history);

  int dimension() const { return static_cast<int>(marginals_.size()); }
  int noise_dim() const { return params_.input_dim(); }
  const GeneratorParams& params() const { return params_; }
  const std::vector<MarginalCdfTable>& marginals() const { return marginals_; }
  const TrainConfig& config() const { return config_; }
  const std::vector<EpochLoss>& loss_history() const { return history_; }

 private:
  GeneratorParams params_;
  std::vector<MarginalCdfTable> marginals_;
  TrainConfig config_;
  std::vector<EpochLoss> history_;
};

/// Called after every epoch; return false to stop early.
using EpochCallback = std::function<bool(const EpochLoss&)>;

/// Fits a generator to unit-space data U (N x D, entries in (0, 1]).
/// Rows are shuffled once and split into floor(N / batch_size) batches (the
/// remainder is dropped); each batch gets one noise matrix that is reused in
/// every epoch unless fresh_noise_per_epoch is set.
TrainedCopulaModel train(const Matrix& u, const TrainConfig& config,
                         const EpochCallback& on_epoch = nullptr);

/// Builds D marginal tables from T fresh generator samples, pushed through the
/// network `chunk_rows` at a time.
std::vector<MarginalCdfTable> finalize_marginals(const GeneratorParams& params,
                                                 const TrainConfig& config,
                                                 Index chunk_rows = 16384);

/// A randomly initialized generator with finalized marginals and no training.
TrainedCopulaModel untrained_model(int dimension, const TrainConfig& config);

/// n x D copula samples: v_d = cdf_eval(table_d, g(z)_d), z ~ N(0, I).
Matrix sample_copula(const TrainedCopulaModel& model, Index n, std::uint64_t seed);

/// Raw generator outputs Y for the same noise sample_copula would draw.
Matrix sample_latent(const TrainedCopulaModel& model, Index n, std::uint64_t seed);

using InverseCdf = std::function<double(double)>;

/// Component-wise inverse PIT of sample_copula output.
Matrix sample_data_space(const TrainedCopulaModel& model, const std::vector<InverseCdf>& inverses,
                         Index n, std::uint64_t seed);

/// Inverse CDFs interpolating the sorted columns of training data.
std::vector<InverseCdf> empirical_inverses(const Matrix& training_data);

/// Applies `inverses` column-wise to unit-space samples.
Matrix apply_inverses(const Matrix& units, const std::vector<InverseCdf>& inverses);

}  // namespace igc
