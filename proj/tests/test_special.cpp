#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace igc;

namespace {

template <typename F>
double simpson(F f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double t_density(double t, double nu) {
  const double c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) / std::sqrt(nu * M_PI);
  return c * std::pow(1.0 + t * t / nu, -0.5 * (nu + 1.0));
}

double t_cdf_by_quadrature(double x, double nu) {
  return 0.5 + simpson([nu](double t) { return t_density(t, nu); }, 0.0, x, 20000);
}

// P(X <= h, Y <= k) = int_{-inf}^{h} phi(x) Phi((k - rho x) / sqrt(1 - rho^2)) dx
double bvn_by_quadrature(double h, double k, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  auto f = [&](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) * normal_cdf((k - rho * x) / s); };
  return simpson(f, -12.0, h, 40000);
}

}  // namespace

TEST(StudentT, ClosedForms) {
  for (double nu : {0.5, 1.0, 3.0, 30.0}) EXPECT_EQ(student_t_cdf(0.0, nu), 0.5);
  EXPECT_NEAR(student_t_cdf(1.0, 1.0), 0.75, 1e-14);
  EXPECT_NEAR(student_t_cdf(-2.0, 1.0), 0.5 + std::atan(-2.0) / M_PI, 1e-14);
  // nu = 2 has F(x) = 1/2 + x / (2 sqrt(2 + x^2)).
  EXPECT_NEAR(student_t_cdf(1.3, 2.0), 0.5 + 1.3 / (2.0 * std::sqrt(2.0 + 1.69)), 1e-14);
}

TEST(StudentT, MatchesQuadratureOfDensity) {
  EXPECT_NEAR(student_t_cdf(2.015, 5.0), 0.95, 1e-4);
  for (double nu : {1.5, 4.0, 5.0, 9.0}) {
    for (double x : {-3.0, -0.7, 0.4, 2.015, 5.0}) {
      EXPECT_NEAR(student_t_cdf(x, nu), t_cdf_by_quadrature(x, nu), 1e-11) << "nu " << nu << " x " << x;
    }
  }
}

TEST(StudentT, SymmetricAndIncreasing) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double nu = rng.uniform(0.5, 40.0), x = rng.uniform(-20.0, 20.0);
    EXPECT_NEAR(student_t_cdf(-x, nu), 1.0 - student_t_cdf(x, nu), 1e-12);
    EXPECT_LE(student_t_cdf(x, nu), student_t_cdf(x + 0.01, nu));
    if (x < 0.0) EXPECT_LT(student_t_cdf(x, nu), student_t_cdf(x + 0.01, nu));
  }
}

TEST(StudentT, LargeDofApproachesNormal) {
  for (double x : {-2.0, 0.5, 1.7}) EXPECT_NEAR(student_t_cdf(x, 1e7), normal_cdf(x), 1e-7);
}

TEST(IncompleteBeta, KnownValues) {
  for (double x : {0.0, 0.1, 0.5, 0.93, 1.0}) {
    EXPECT_NEAR(incomplete_beta(1.0, 1.0, x), x, 1e-14);
    EXPECT_NEAR(incomplete_beta(2.5, 1.0, x), std::pow(x, 2.5), 1e-14);
    EXPECT_NEAR(incomplete_beta(1.0, 3.0, x), 1.0 - std::pow(1.0 - x, 3.0), 1e-14);
  }
  EXPECT_NEAR(incomplete_beta(3.0, 7.0, 0.4) + incomplete_beta(7.0, 3.0, 0.6), 1.0, 1e-14);
}

TEST(NormalQuantile, InvertsCdf) {
  for (double p : {1e-12, 1e-6, 0.02, 0.3, 0.5, 0.77, 0.975, 1 - 1e-9}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-14 + 1e-12 * p);
  }
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-13);
  EXPECT_EQ(normal_quantile(0.0), -INFINITY);
  EXPECT_EQ(normal_quantile(1.0), INFINITY);
  EXPECT_THROW(normal_quantile(1.5), std::domain_error);
}

TEST(BivariateNormal, ClosedForms) {
  for (double h : {-1.0, 0.0, 0.8})
    for (double k : {-0.3, 1.2}) EXPECT_NEAR(bivariate_normal_cdf(h, k, 0.0), normal_cdf(h) * normal_cdf(k), 1e-14);
  for (double rho : {-0.9, -0.3, 0.5, 0.95}) {
    EXPECT_NEAR(bivariate_normal_cdf(0.0, 0.0, rho), 0.25 + std::asin(rho) / (2.0 * M_PI), 1e-14);
  }
}

TEST(BivariateNormal, MatchesOneDimensionalQuadrature) {
  for (double rho : {-0.95, -0.5, 0.2, 0.7, 0.99})
    for (double h : {-2.5, -0.4, 1.1})
      for (double k : {-1.0, 0.3, 2.2}) {
        EXPECT_NEAR(bivariate_normal_cdf(h, k, rho), bvn_by_quadrature(h, k, rho), 1e-10)
            << rho << " " << h << " " << k;
      }
}

TEST(BivariateNormal, MonteCarlo) {
  Rng rng(2);
  const double rho = 0.6, h = 0.3, k = -0.2;
  int hits = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    const double y = rho * x + std::sqrt(1 - rho * rho) * rng.normal();
    hits += x <= h && y <= k;
  }
  EXPECT_NEAR(bivariate_normal_cdf(h, k, rho), static_cast<double>(hits) / n, 0.002);
}
