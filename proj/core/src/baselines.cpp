#include "igc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "igc/special.hpp"
#include "igc/synth.hpp"

namespace igc {

namespace {

Matrix unit_diagonal(const Matrix& m) {
  const Vector inv_sd = m.diagonal().cwiseSqrt().cwiseInverse();
  Matrix r = inv_sd.asDiagonal() * m * inv_sd.asDiagonal();
  r = 0.5 * (r + r.transpose());
  r.diagonal().setOnes();
  return r;
}

}  // namespace

GaussianCopulaModel fit_gaussian_copula(const Matrix& u) {
  const Index n = u.rows();
  const Index dims = u.cols();
  if (dims < 1 || n <= dims) throw std::invalid_argument("fit_gaussian_copula: need N > D");
  const double top = 1.0 - 0.5 / static_cast<double>(n);
  const double bottom = 0.5 / static_cast<double>(n);
  Matrix scores(n, dims);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d < dims; ++d) {
      const double v = u(i, d);
      if (!(v > 0.0 && v <= 1.0)) {
        throw std::invalid_argument("fit_gaussian_copula: pseudo-observations must lie in (0, 1]");
      }
      scores(i, d) = normal_quantile(std::clamp(v, bottom, top));
    }
  }
  const Matrix centered = scores.rowwise() - scores.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
  if ((cov.diagonal().array() <= 0.0).any()) {
    throw std::invalid_argument("fit_gaussian_copula: a column has constant normal scores");
  }
  Matrix r = unit_diagonal(cov);

  if (Eigen::LLT<Matrix>(r).info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r);
    const Vector floored = eig.eigenvalues().cwiseMax(1e-10);
    r = unit_diagonal(eig.eigenvectors() * floored.asDiagonal() * eig.eigenvectors().transpose());
    if (Eigen::LLT<Matrix>(r).info() != Eigen::Success) {
      throw std::runtime_error("fit_gaussian_copula: correlation estimate is rank deficient");
    }
  }
  return GaussianCopulaModel{r, n};
}

Matrix sample_baseline(const GaussianCopulaModel& model, Index n, std::uint64_t seed) {
  return sample_gaussian_copula(model.correlation, n, seed);
}

Matrix sample_independence_baseline(int dimension, Index n, std::uint64_t seed) {
  return sample_independence(n, dimension, seed);
}

}  // namespace igc
