#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "igc/types.hpp"

namespace igc {

// ---------------------------------------------------------------------------
// Ranks

/// u[n][d] = (1/N) * #{i : x[i][d] <= x[n][d]}, per column, via sorting.
/// Ties share the maximum rank. Throws on N < 2 or non-finite entries.
Matrix pseudo_observations(const Matrix& x);

/// Same rule as pseudo_observations; used as the non-differentiable reference
/// for softrank.
Matrix hard_rank(const Matrix& y);

/// True when every entry lies in (0, 1], i.e. the data already looks like
/// unit-space pseudo-observations.
bool is_unit_space(const Matrix& x);

// ---------------------------------------------------------------------------
// Softrank

struct SoftrankOptions {
  double alpha = 1000.0;
  /// Divide each column by its interquartile range before applying alpha.
  bool scale_by_iqr = false;
};

/// Differentiable order-statistic scale of one column: q75 - q25 with linear
/// interpolation between order statistics. The four contributing rows and
/// their weights give d(scale)/dy.
struct ColumnScale {
  double value = 1.0;
  bool differentiable = false;
  Index rows[4] = {0, 0, 0, 0};
  double weights[4] = {0, 0, 0, 0};
};

ColumnScale interquartile_range(std::span<const double> column);

struct SoftrankCache {
  Matrix input;
  SoftrankOptions options;
  std::vector<ColumnScale> scales;
  std::vector<double> sharpness;  // effective alpha per column
  /// sigmoid(a (y_m - y_j)) per column, M x M.
  std::vector<Matrix> sigmoid;
};

/// v[m][d] = (1/M) (0.5 + sum_j sigmoid(a_d (y[m][d] - y[j][d]))), j = m included.
/// a_d = alpha, or alpha / IQR_d with scale_by_iqr. Tends to hard_rank as
/// a_d -> infinity; every column sums to (M + 1) / 2.
Matrix softrank(const Matrix& y, const SoftrankOptions& options, SoftrankCache* cache = nullptr);

/// dL/dY given dL/dV for the softrank evaluated into `cache`.
Matrix softrank_backward(const SoftrankCache& cache, const Matrix& d_output);

// ---------------------------------------------------------------------------
// Piecewise-linear monotone CDFs

/// Monotone CDF given by knots (y_k, p_k), both strictly increasing, with
/// linear interpolation between knots and clamping outside them.
class PiecewiseLinearCdf {
 public:
  PiecewiseLinearCdf() = default;
  PiecewiseLinearCdf(std::vector<double> knots, std::vector<double> probs, double lower_clamp,
                     double upper_clamp);

  double cdf(double y) const;
  /// Inverse of the same interpolant. Throws std::domain_error unless 0 < u < 1.
  double inverse(double u) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& probs() const { return probs_; }
  double lower_clamp() const { return lower_; }
  double upper_clamp() const { return upper_; }

 private:
  std::vector<double> knots_;
  std::vector<double> probs_;
  double lower_ = 0.0;
  double upper_ = 1.0;
};

/// Frozen approximation of one latent marginal CDF, summarizing T generator
/// samples with G quantile knots.
struct MarginalCdfTable {
  PiecewiseLinearCdf cdf;
  int dimension = 0;
  std::int64_t sample_count = 0;  // T

  /// Boundary margin 1 / (2T).
  double boundary() const { return 0.5 / static_cast<double>(sample_count); }
};

/// Builds a table from T samples. Knot k sits at order statistic
/// i_k = round(1 + k (T - 1) / (G - 1)) with probability (i_k - 0.5) / T, so the
/// extremes map to 1/(2T) and 1 - 1/(2T). Repeated sample values collapse to a
/// single knot carrying the largest probability.
/// Throws if T < G, G < 2, a sample is non-finite, or all samples are equal.
MarginalCdfTable build_marginal_cdf_table(std::span<const double> samples, int knot_count,
                                          int dimension = 0);

/// cdf(y), clamped to [1/(2T), 1 - 1/(2T)].
double cdf_eval(const MarginalCdfTable& table, double y);
double inverse_cdf_eval(const MarginalCdfTable& table, double u);

/// Empirical marginal of a data column: knots are the sorted distinct values
/// with probability rank / N (maximum rank on ties). Its inverse maps (0, 1)
/// into [min, max] of the column.
PiecewiseLinearCdf empirical_marginal(std::span<const double> column);
double inverse_cdf_eval(const PiecewiseLinearCdf& cdf, double u);

/// Empirical marginals for every column of `x`.
std::vector<PiecewiseLinearCdf> empirical_marginals(const Matrix& x);

}  // namespace igc
