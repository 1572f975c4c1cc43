#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "igc/igc.hpp"

namespace igc::testing {

inline std::span<const double> col(const Matrix& m, Index c) {
  return {m.col(c).data(), static_cast<std::size_t>(m.rows())};
}

inline double tau12(const Matrix& m) { return kendall_tau(col(m, 0), col(m, 1)); }

inline Matrix uniform_matrix(Rng& rng, Index rows, Index cols, double lo = 0.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
  return m;
}

// Central differences of a scalar function of a matrix.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, Matrix x, double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  for (Index i = 0; i < x.size(); ++i) {
    const double keep = x(i);
    x(i) = keep + h;
    const double up = f(x);
    x(i) = keep - h;
    const double down = f(x);
    x(i) = keep;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

// Largest entrywise relative error, with a small absolute floor so entries
// that are zero up to rounding do not dominate.
inline double max_relative_error(const Matrix& analytic, const Matrix& numeric, double floor = 1e-8) {
  double worst = 0.0;
  for (Index i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(analytic(i)), std::abs(numeric(i)), floor});
    worst = std::max(worst, std::abs(analytic(i) - numeric(i)) / scale);
  }
  return worst;
}

// O(n^2) tau-a by definition.
inline double brute_force_tau(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double x = (a[i] - a[j]) * (b[i] - b[j]);
      s += (x > 0) - (x < 0);
    }
  return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace igc::testing
