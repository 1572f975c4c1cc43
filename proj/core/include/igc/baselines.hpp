#pragma once

#include <cstdint>

#include "igc/types.hpp"

namespace igc {

struct GaussianCopulaModel {
  Matrix correlation;
  Index fit_size = 0;
};

/// Normal-scores correlation fit. Values u = 1 are clamped to 1 - 1/(2N)
/// before the normal quantile; a non-PD estimate is repaired by flooring
/// eigenvalues at 1e-10 and rescaling to unit diagonal.
GaussianCopulaModel fit_gaussian_copula(const Matrix& u);

Matrix sample_baseline(const GaussianCopulaModel& model, Index n, std::uint64_t seed);

/// Independence copula: i.i.d. U(0,1) entries.
Matrix sample_independence_baseline(int dimension, Index n, std::uint64_t seed);

}  // namespace igc
