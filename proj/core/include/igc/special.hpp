#pragma once

namespace igc {

double normal_cdf(double x);
/// Standard normal quantile, |error| ~ 1e-15 (rational start + one Halley step).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b), Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with `dof` degrees of freedom.
double student_t_cdf(double x, double dof);

/// P(X <= h, Y <= k) for a standard bivariate normal with correlation rho,
/// |rho| < 1, by Gauss-Legendre quadrature of Plackett's identity.
double bivariate_normal_cdf(double h, double k, double rho);

}  // namespace igc
