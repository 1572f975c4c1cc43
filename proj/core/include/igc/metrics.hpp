#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "igc/types.hpp"

namespace igc {

/// One evaluation result and everything needed to recompute it.
struct MetricReport {
  std::string candidate;
  std::string metric;
  double value = 0.0;
  Index data_size = 0;
  Index model_size = 0;
  std::string configuration;
  std::uint64_t seed = 0;
};

/// V-statistic energy distance 2E|A-B| - E|A-A'| - E|B-B'| over all ordered
/// pairs (i = j included).
double energy_distance(const Matrix& a, const Matrix& b);

/// (1/N) #{n : u_n <= w componentwise}. Throws if w leaves [0, 1]^D.
double empirical_copula_cdf(const Matrix& u, std::span<const double> w);

/// Empirical copula of `u` evaluated at every row of `points`. Uses an
/// O((N + P) log N) sweep for D = 2 and direct counting otherwise.
Vector empirical_copula_cdf_batch(const Matrix& u, const Matrix& points);

/// Copula CDF callable, w in [0, 1]^D.
using CopulaCdf = std::function<double(std::span<const double>)>;

struct IseOptions {
  /// Allows D > 5, where empirical copula CDFs become too coarse to trust.
  bool allow_high_dimension = false;
};

/// Integrated squared error approximated at the data vectors:
///   (1/N) sum_n (F_U(u_n) - F_V(u_n))^2
/// F_U is `reference` when given, else the empirical copula of `data`;
/// F_V is the empirical copula of `model_samples`.
double ise(const Matrix& data, const Matrix& model_samples, const CopulaCdf& reference = nullptr,
           const IseOptions& options = {});

/// Biased squared MMD with k(x, y) = exp(-|x - y|^2 / (2 sigma^2)).
double mmd_gaussian(const Matrix& a, const Matrix& b, double bandwidth);

/// Median pairwise Euclidean distance over at most `cap` evenly strided rows of
/// `pooled`. Throws if the median is zero.
double median_heuristic(const Matrix& pooled, Index cap = 2000);
double median_heuristic(const Matrix& a, const Matrix& b, Index cap = 2000);

/// Kendall tau-a, O(n log n): (concordant - discordant) / (n (n - 1) / 2).
/// Pairs tied in either argument count as neither.
double kendall_tau(std::span<const double> a, std::span<const double> b);

/// D x D matrix of pairwise Kendall tau between columns.
Matrix kendall_tau_matrix(const Matrix& x);

/// Kolmogorov-Smirnov distance between the sample's empirical CDF and U(0,1).
double ks_uniform(std::span<const double> samples);

/// Kolmogorov-Smirnov distance against an arbitrary continuous CDF.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Mean negative log density of `test` under a Gaussian product-kernel density
/// estimate fit on `train` (both n x 2) with Scott's-rule bandwidths
/// h_d = sd_d * n^(-1/6). Densities are floored at 1e-300.
double kde_nll(const Matrix& train, const Matrix& test);

/// Scott's-rule bandwidth used by kde_nll for each column of `train`.
Vector scott_bandwidths(const Matrix& train);

}  // namespace igc
