#include "igc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "igc/special.hpp"
#include "igc/transforms.hpp"

namespace igc {

const char* to_string(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::independence:
      return "independence";
    case CopulaFamily::gaussian:
      return "gaussian";
    case CopulaFamily::student_t:
      return "student_t";
    case CopulaFamily::clayton:
      return "clayton";
    case CopulaFamily::gumbel:
      return "gumbel";
    case CopulaFamily::gaussian_mixture:
      return "gaussian_mixture";
  }
  return "?";
}

CopulaFamily copula_family_from_string(const std::string& name) {
  for (auto f : {CopulaFamily::independence, CopulaFamily::gaussian, CopulaFamily::student_t,
                 CopulaFamily::clayton, CopulaFamily::gumbel, CopulaFamily::gaussian_mixture}) {
    if (name == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown copula family '" + name + "'");
}

Rotation rotation_from_degrees(int degrees) {
  switch (degrees) {
    case 0:
      return Rotation::r0;
    case 90:
      return Rotation::r90;
    case 180:
      return Rotation::r180;
    case 270:
      return Rotation::r270;
    default:
      throw std::invalid_argument("rotation must be one of 0, 90, 180, 270 (got " +
                                  std::to_string(degrees) + ")");
  }
}

namespace {

Eigen::LLT<Matrix> checked_cholesky(const Matrix& r) {
  if (r.rows() < 1 || r.rows() != r.cols()) throw std::invalid_argument("correlation matrix must be square");
  for (Index i = 0; i < r.rows(); ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("correlation matrix must have unit diagonal");
    }
    for (Index j = 0; j < i; ++j) {
      if (std::abs(r(i, j) - r(j, i)) > 1e-12) {
        throw std::invalid_argument("correlation matrix must be symmetric");
      }
    }
  }
  Eigen::LLT<Matrix> llt(r);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("correlation matrix is not positive definite");
  }
  return llt;
}

void check_mixture(const GaussianMixtureSpec& spec) {
  for (const auto& c : spec.components) {
    if (!(std::abs(c.correlation) < 1.0)) {
      throw std::invalid_argument("mixture component correlation must satisfy |s12| < 1");
    }
    if (!(c.scale > 0.0)) throw std::invalid_argument("mixture component scale must be positive");
  }
}

}  // namespace

void CopulaSpec::validate() const {
  if (dimension < 2) throw std::invalid_argument("copula dimension must be >= 2");
  switch (family) {
    case CopulaFamily::independence:
      break;
    case CopulaFamily::student_t:
      if (!(dof > 0.0)) throw std::invalid_argument("nu (degrees of freedom) must be positive");
      [[fallthrough]];
    case CopulaFamily::gaussian:
      if (correlation.rows() != dimension) {
        throw std::invalid_argument("rho: correlation matrix must be " + std::to_string(dimension) +
                                    " x " + std::to_string(dimension));
      }
      checked_cholesky(correlation);
      break;
    case CopulaFamily::clayton:
      if (dimension != 2) throw std::invalid_argument("clayton sampler is bivariate");
      if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0 for clayton");
      break;
    case CopulaFamily::gumbel:
      if (dimension != 2) throw std::invalid_argument("gumbel sampler is bivariate");
      if (!(theta >= 1.0)) throw std::invalid_argument("theta must be >= 1 for gumbel");
      break;
    case CopulaFamily::gaussian_mixture:
      if (dimension != 2) throw std::invalid_argument("gaussian mixture copula is bivariate");
      check_mixture(mixture);
      break;
  }
  if (rotation != Rotation::r0 && family != CopulaFamily::clayton && family != CopulaFamily::gumbel) {
    throw std::invalid_argument("rotation only applies to clayton and gumbel");
  }
}

std::string CopulaSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(family) << " D=" << dimension;
  switch (family) {
    case CopulaFamily::gaussian:
    case CopulaFamily::student_t:
      if (dimension == 2) os << " rho=" << correlation(0, 1);
      if (family == CopulaFamily::student_t) os << " nu=" << dof;
      break;
    case CopulaFamily::clayton:
    case CopulaFamily::gumbel:
      os << " theta=" << theta << " rotation=" << static_cast<int>(rotation);
      break;
    case CopulaFamily::gaussian_mixture:
      for (std::size_t j = 0; j < 2; ++j) {
        const auto& c = mixture.components[j];
        os << " mu" << j + 1 << "=(" << c.mean[0] << ";" << c.mean[1] << ") s12_" << j + 1 << "="
           << c.correlation << " a" << j + 1 << "=" << c.scale;
      }
      break;
    case CopulaFamily::independence:
      break;
  }
  return os.str();
}

Matrix equicorrelation(int dimension, double rho) {
  Matrix r = Matrix::Constant(dimension, dimension, rho);
  r.diagonal().setOnes();
  return r;
}

Matrix sample_independence(Index n, int dimension, std::uint64_t seed) {
  Rng rng(seed);
  Matrix u(n, dimension);
  for (Index i = 0; i < n; ++i) {
    for (int d = 0; d < dimension; ++d) u(i, d) = rng.uniform_open();
  }
  return u;
}

Matrix sample_gaussian_copula(const Matrix& correlation, Index n, std::uint64_t seed) {
  const auto llt = checked_cholesky(correlation);
  const Matrix lower = llt.matrixL();
  const Index dims = correlation.rows();
  Rng rng(seed);
  Matrix u(n, dims);
  Vector z(dims);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d < dims; ++d) z(d) = rng.normal();
    const Vector x = lower * z;
    for (Index d = 0; d < dims; ++d) u(i, d) = normal_cdf(x(d));
  }
  return u;
}

Matrix sample_student_t_copula(const Matrix& correlation, double dof, Index n, std::uint64_t seed) {
  if (!(dof > 0.0)) throw std::invalid_argument("nu (degrees of freedom) must be positive");
  const auto llt = checked_cholesky(correlation);
  const Matrix lower = llt.matrixL();
  const Index dims = correlation.rows();
  Rng rng(seed);
  Matrix u(n, dims);
  Vector z(dims);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d < dims; ++d) z(d) = rng.normal();
    const double chi2 = 2.0 * rng.gamma(0.5 * dof);
    const double mix = std::sqrt(dof / chi2);
    const Vector x = lower * z * mix;
    for (Index d = 0; d < dims; ++d) u(i, d) = student_t_cdf(x(d), dof);
  }
  return u;
}

Matrix rotate_copula(const Matrix& u, Rotation rotation) {
  if (u.cols() != 2) throw std::invalid_argument("rotate_copula: only bivariate samples can be rotated");
  Matrix out(u.rows(), 2);
  for (Index i = 0; i < u.rows(); ++i) {
    const double a = u(i, 0);
    const double b = u(i, 1);
    switch (rotation) {
      case Rotation::r0:
        out(i, 0) = a;
        out(i, 1) = b;
        break;
      case Rotation::r90:
        out(i, 0) = b;
        out(i, 1) = 1.0 - a;
        break;
      case Rotation::r180:
        out(i, 0) = 1.0 - a;
        out(i, 1) = 1.0 - b;
        break;
      case Rotation::r270:
        out(i, 0) = 1.0 - b;
        out(i, 1) = a;
        break;
    }
  }
  return out;
}

Matrix sample_clayton(double theta, Rotation rotation, Index n, std::uint64_t seed) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0 for clayton (got " + std::to_string(theta) + ")");
  Rng rng(seed);
  Matrix u(n, 2);
  const double inv = 1.0 / theta;
  for (Index i = 0; i < n; ++i) {
    const double frailty = rng.gamma(inv);
    for (int d = 0; d < 2; ++d) u(i, d) = std::pow(1.0 + rng.exponential() / frailty, -inv);
  }
  return rotate_copula(u, rotation);
}

Matrix sample_gumbel(double theta, Rotation rotation, Index n, std::uint64_t seed) {
  if (!(theta >= 1.0)) throw std::invalid_argument("theta must be >= 1 for gumbel (got " + std::to_string(theta) + ")");
  Rng rng(seed);
  Matrix u(n, 2);
  const double index = 1.0 / theta;
  for (Index i = 0; i < n; ++i) {
    const double frailty = rng.positive_stable(index);
    for (int d = 0; d < 2; ++d) u(i, d) = std::exp(-std::pow(rng.exponential() / frailty, index));
  }
  return rotate_copula(u, rotation);
}

MixtureSample sample_gaussian_mixture_copula(const GaussianMixtureSpec& spec, Index n,
                                             std::uint64_t seed) {
  check_mixture(spec);
  Rng rng(seed);
  MixtureSample out;
  out.data.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    const auto& c = spec.components[rng.index(2)];
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double sd = std::sqrt(c.scale);
    out.data(i, 0) = c.mean[0] + sd * z1;
    out.data(i, 1) = c.mean[1] + sd * (c.correlation * z1 + std::sqrt(1.0 - c.correlation * c.correlation) * z2);
  }
  if (n >= 2) out.units = pseudo_observations(out.data);
  else out.units = Matrix::Constant(n, 2, 1.0);
  return out;
}

Matrix sample_copula_spec(const CopulaSpec& spec, Index n, std::uint64_t seed) {
  spec.validate();
  switch (spec.family) {
    case CopulaFamily::independence:
      return sample_independence(n, spec.dimension, seed);
    case CopulaFamily::gaussian:
      return sample_gaussian_copula(spec.correlation, n, seed);
    case CopulaFamily::student_t:
      return sample_student_t_copula(spec.correlation, spec.dof, n, seed);
    case CopulaFamily::clayton:
      return sample_clayton(spec.theta, spec.rotation, n, seed);
    case CopulaFamily::gumbel:
      return sample_gumbel(spec.theta, spec.rotation, n, seed);
    case CopulaFamily::gaussian_mixture:
      return sample_gaussian_mixture_copula(spec.mixture, n, seed).units;
  }
  throw std::logic_error("unhandled copula family");
}

double clayton_cdf(double u1, double u2, double theta) {
  if (u1 <= 0.0 || u2 <= 0.0) return 0.0;
  if (u1 >= 1.0) return std::min(u2, 1.0);
  if (u2 >= 1.0) return u1;
  const double s = std::pow(u1, -theta) + std::pow(u2, -theta) - 1.0;
  return std::pow(s, -1.0 / theta);
}

double gumbel_cdf(double u1, double u2, double theta) {
  if (u1 <= 0.0 || u2 <= 0.0) return 0.0;
  if (u1 >= 1.0) return std::min(u2, 1.0);
  if (u2 >= 1.0) return u1;
  const double s = std::pow(-std::log(u1), theta) + std::pow(-std::log(u2), theta);
  return std::exp(-std::pow(s, 1.0 / theta));
}

double rotated_cdf(double w1, double w2, Rotation rotation,
                   const std::function<double(double, double)>& base) {
  double value = 0.0;
  switch (rotation) {
    case Rotation::r0:
      value = base(w1, w2);
      break;
    case Rotation::r90:  // (U2, 1 - U1)
      value = w1 - base(1.0 - w2, w1);
      break;
    case Rotation::r180:  // (1 - U1, 1 - U2)
      value = w1 + w2 - 1.0 + base(1.0 - w1, 1.0 - w2);
      break;
    case Rotation::r270:  // (1 - U2, U1)
      value = w2 - base(w2, 1.0 - w1);
      break;
  }
  return std::clamp(value, 0.0, 1.0);
}

std::optional<CopulaCdf> analytic_copula_cdf(const CopulaSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case CopulaFamily::independence:
      return CopulaCdf([](std::span<const double> w) {
        double p = 1.0;
        for (double x : w) p *= x;
        return p;
      });
    case CopulaFamily::gaussian: {
      if (spec.dimension != 2) return std::nullopt;
      const double rho = spec.correlation(0, 1);
      return CopulaCdf([rho](std::span<const double> w) {
        return bivariate_normal_cdf(normal_quantile(w[0]), normal_quantile(w[1]), rho);
      });
    }
    case CopulaFamily::clayton: {
      const double theta = spec.theta;
      const Rotation rot = spec.rotation;
      return CopulaCdf([theta, rot](std::span<const double> w) {
        return rotated_cdf(w[0], w[1], rot, [theta](double a, double b) { return clayton_cdf(a, b, theta); });
      });
    }
    case CopulaFamily::gumbel: {
      const double theta = spec.theta;
      const Rotation rot = spec.rotation;
      return CopulaCdf([theta, rot](std::span<const double> w) {
        return rotated_cdf(w[0], w[1], rot, [theta](double a, double b) { return gumbel_cdf(a, b, theta); });
      });
    }
    case CopulaFamily::student_t:
    case CopulaFamily::gaussian_mixture:
      return std::nullopt;
  }
  return std::nullopt;
}

const char* to_string(Toy2d kind) {
  switch (kind) {
    case Toy2d::swiss_roll:
      return "swiss_roll";
    case Toy2d::ring:
      return "ring";
    case Toy2d::grid:
      return "grid";
  }
  return "?";
}

Toy2d toy2d_from_string(const std::string& name) {
  for (auto k : {Toy2d::swiss_roll, Toy2d::ring, Toy2d::grid}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown toy dataset '" + name + "' (expected swiss_roll, ring, grid)");
}

Matrix sample_toy2d(Toy2d kind, Index n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("toy dataset needs n >= 1");
  Rng rng(seed);
  Matrix x(n, 2);
  constexpr double pi = std::numbers::pi;
  for (Index i = 0; i < n; ++i) {
    switch (kind) {
      case Toy2d::swiss_roll: {
        const double t = rng.uniform(1.5 * pi, 4.5 * pi);
        x(i, 0) = t * std::cos(t) / 3.0 + 0.05 * rng.normal();
        x(i, 1) = t * std::sin(t) / 3.0 + 0.05 * rng.normal();
        break;
      }
      case Toy2d::ring: {
        const double angle = 2.0 * pi * static_cast<double>(rng.index(8)) / 8.0;
        x(i, 0) = 2.0 * std::cos(angle) + 0.1 * rng.normal();
        x(i, 1) = 2.0 * std::sin(angle) + 0.1 * rng.normal();
        break;
      }
      case Toy2d::grid: {
        const std::size_t cell = rng.index(25);
        x(i, 0) = 2.0 * (static_cast<double>(cell % 5) - 2.0) + 0.1 * rng.normal();
        x(i, 1) = 2.0 * (static_cast<double>(cell / 5) - 2.0) + 0.1 * rng.normal();
        break;
      }
    }
  }
  return x;
}

GaussianMixtureSpec random_gaussian_mixture_spec(Rng& rng) {
  GaussianMixtureSpec spec;
  for (auto& c : spec.components) {
    c.mean[0] = rng.uniform(-5.0, 5.0);
    c.mean[1] = rng.uniform(-5.0, 5.0);
    c.correlation = rng.uniform(-0.95, 0.95);
    c.scale = rng.uniform(0.8, 1.2);
  }
  return spec;
}

CopulaSpec random_bivariate_benchmark(CopulaFamily family, Rng& rng) {
  CopulaSpec spec;
  spec.family = family;
  spec.dimension = 2;
  auto signed_rho = [&] {
    const double magnitude = rng.uniform(0.5, 0.95);
    return rng.index(2) == 0 ? magnitude : -magnitude;
  };
  switch (family) {
    case CopulaFamily::gaussian:
      spec.correlation = equicorrelation(2, signed_rho());
      break;
    case CopulaFamily::student_t:
      spec.correlation = equicorrelation(2, signed_rho());
      spec.dof = rng.uniform(2.0, 10.0);
      break;
    case CopulaFamily::clayton:
    case CopulaFamily::gumbel:
      spec.theta = rng.uniform(2.0, 10.0);
      spec.rotation = static_cast<Rotation>(90 * static_cast<int>(rng.index(4)));
      break;
    case CopulaFamily::gaussian_mixture:
      spec.mixture = random_gaussian_mixture_spec(rng);
      break;
    case CopulaFamily::independence:
      throw std::invalid_argument("random_bivariate_benchmark: unsupported family 'independence'");
  }
  return spec;
}

}  // namespace igc
