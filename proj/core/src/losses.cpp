#include "igc/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace igc {

EnergyLoss energy_loss(const Matrix& data, const Matrix& model) {
  const Index n = data.rows();
  const Index m = model.rows();
  if (n < 1) throw std::invalid_argument("energy_loss: data batch is empty");
  if (m < 2) throw std::invalid_argument("energy_loss: need at least 2 model samples");
  if (data.cols() != model.cols()) throw std::invalid_argument("energy_loss: dimension mismatch");
  require_finite(data, "energy_loss data");
  require_finite(model, "energy_loss model samples");

  // D x rows so each point is contiguous.
  const Matrix u = data.transpose();
  const Matrix v = model.transpose();
  const Index dims = u.rows();
  Matrix grad_t = Matrix::Zero(dims, m);

  const double cross_w = 1.0 / (static_cast<double>(n) * static_cast<double>(m));
  double cross = 0.0;
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      const auto diff = v.col(j) - u.col(i);
      const double dist = diff.norm();
      cross += dist;
      if (dist > 0.0) grad_t.col(j) += (cross_w / dist) * diff;
    }
  }

  const double self_w = 1.0 / (static_cast<double>(m) * static_cast<double>(m - 1));
  double self = 0.0;  // sum over unordered pairs
  for (Index j = 0; j < m; ++j) {
    for (Index k = j + 1; k < m; ++k) {
      const auto diff = v.col(j) - v.col(k);
      const double dist = diff.norm();
      self += dist;
      if (dist > 0.0) {
        const Vector step = (self_w / dist) * diff;
        grad_t.col(j) -= step;
        grad_t.col(k) += step;
      }
    }
  }

  EnergyLoss out;
  // The printed 1/(2M(M-1)) factor over ordered pairs equals 1/(M(M-1)) over unordered ones.
  out.value = cross * cross_w - self * self_w;
  out.gradient = grad_t.transpose();
  return out;
}

}  // namespace igc
