#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "igc/metrics.hpp"
#include "igc/random.hpp"
#include "igc/types.hpp"

namespace igc {

enum class CopulaFamily { independence, gaussian, student_t, clayton, gumbel, gaussian_mixture };

const char* to_string(CopulaFamily f);
CopulaFamily copula_family_from_string(const std::string& name);

/// Counter-clockwise rotation of a bivariate copula in degrees.
enum class Rotation { r0 = 0, r90 = 90, r180 = 180, r270 = 270 };

Rotation rotation_from_degrees(int degrees);

/// Bivariate Gaussian N(mean, scale * [[1, s12], [s12, 1]]).
struct MixtureComponent {
  std::array<double, 2> mean{0.0, 0.0};
  double correlation = 0.0;  // s12
  double scale = 1.0;        // alpha_j
};

/// Equal-weight two-component bivariate Gaussian mixture.
struct GaussianMixtureSpec {
  std::array<MixtureComponent, 2> components;
};

struct CopulaSpec {
  CopulaFamily family = CopulaFamily::independence;
  int dimension = 2;
  Matrix correlation;  // gaussian / student_t
  double dof = 0.0;    // student_t
  double theta = 0.0;  // clayton / gumbel
  Rotation rotation = Rotation::r0;
  GaussianMixtureSpec mixture;

  /// Throws std::invalid_argument naming the offending parameter.
  void validate() const;
  std::string describe() const;
};

/// D x D matrix with unit diagonal and `rho` elsewhere.
Matrix equicorrelation(int dimension, double rho);

Matrix sample_independence(Index n, int dimension, std::uint64_t seed);
Matrix sample_gaussian_copula(const Matrix& correlation, Index n, std::uint64_t seed);
Matrix sample_student_t_copula(const Matrix& correlation, double dof, Index n, std::uint64_t seed);
/// Marshall-Olkin with Gamma(1/theta) frailty. theta > 0.
Matrix sample_clayton(double theta, Rotation rotation, Index n, std::uint64_t seed);
/// Marshall-Olkin with positive-stable frailty of index 1/theta. theta >= 1.
Matrix sample_gumbel(double theta, Rotation rotation, Index n, std::uint64_t seed);

struct MixtureSample {
  Matrix data;   // X, n x 2
  Matrix units;  // pseudo-observations of X
};
MixtureSample sample_gaussian_mixture_copula(const GaussianMixtureSpec& spec, Index n,
                                             std::uint64_t seed);

/// 90: (u1, u2) -> (u2, 1 - u1); 180: (1 - u1, 1 - u2); 270: (1 - u2, u1).
Matrix rotate_copula(const Matrix& u, Rotation rotation);

/// Draws a unit-space sample from any spec. For gaussian_mixture the
/// pseudo-observations of the mixture draw are returned.
Matrix sample_copula_spec(const CopulaSpec& spec, Index n, std::uint64_t seed);

/// Analytic copula CDF when one is implemented (independence, clayton,
/// gumbel with rotations; bivariate gaussian).
std::optional<CopulaCdf> analytic_copula_cdf(const CopulaSpec& spec);

double clayton_cdf(double u1, double u2, double theta);
double gumbel_cdf(double u1, double u2, double theta);
/// CDF of the rotated copula given the CDF of the unrotated one.
double rotated_cdf(double w1, double w2, Rotation rotation,
                   const std::function<double(double, double)>& base);

enum class Toy2d { swiss_roll, ring, grid };

const char* to_string(Toy2d kind);
Toy2d toy2d_from_string(const std::string& name);

/// swiss_roll: t ~ U(1.5 pi, 4.5 pi), (t cos t, t sin t) / 3 + N(0, 0.05^2 I)
/// ring: 8 Gaussians on a radius-2 circle, sd 0.1
/// grid: 5 x 5 Gaussians at {-4, -2, 0, 2, 4}^2, sd 0.1
Matrix sample_toy2d(Toy2d kind, Index n, std::uint64_t seed);

/// Random benchmark spec with parameters drawn uniformly from the pair-copula
/// ranges: student_t |rho| in [0.5, 0.95] with random sign, dof in [2, 10];
/// clayton / gumbel theta in [2, 10] with a uniform rotation; gaussian
/// rho in +-[0.5, 0.95]; gaussian_mixture per the two-component scheme.
CopulaSpec random_bivariate_benchmark(CopulaFamily family, Rng& rng);

/// Two components with means ~ U(-5, 5)^2, s12 ~ U(-0.95, 0.95), scale ~ U(0.8, 1.2).
GaussianMixtureSpec random_gaussian_mixture_spec(Rng& rng);

}  // namespace igc
