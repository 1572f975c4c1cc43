#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace igc {

/// Dense N x D table. Rows are observations, columns are dimensions.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a computation produces NaN/Inf (diverged training, bad input data).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a backward pass is handed a cache that no longer matches its parameters.
class StaleCacheError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Throws NumericalError naming `what` if any entry of `m` is not finite.
void require_finite(const Matrix& m, const std::string& what);

}  // namespace igc
