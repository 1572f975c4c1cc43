#pragma once

#include "igc/types.hpp"

namespace igc {

struct EnergyLoss {
  double value = 0.0;
  Matrix gradient;  // dL/dV, M x D
};

/// Training loss between a data batch U (n x D) and model output V (M x D):
///
///   L = 1/(nM) sum_{n,m} |u_n - v_m| - 1/(2M(M-1)) sum_{m,m'} |v_m - v_m'|
///
/// The data-data term of the energy distance is constant in the model
/// parameters and omitted. Coincident pairs contribute zero gradient.
EnergyLoss energy_loss(const Matrix& data, const Matrix& model);

}  // namespace igc
