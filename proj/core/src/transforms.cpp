#include "igc/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace igc {

namespace {

std::vector<Index> sorted_order(const double* values, Index n) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [values](Index a, Index b) { return values[a] < values[b]; });
  return order;
}

// Fraction of entries <= each entry, one column at a time.
Matrix column_ranks(const Matrix& x) {
  const Index n = x.rows();
  Matrix out(n, x.cols());
  const double dn = static_cast<double>(n);
  for (Index d = 0; d < x.cols(); ++d) {
    const double* col = x.col(d).data();
    const auto order = sorted_order(col, n);
    Index start = 0;
    while (start < n) {
      Index end = start + 1;
      while (end < n && col[order[end]] == col[order[start]]) ++end;
      const double rank = static_cast<double>(end) / dn;
      for (Index i = start; i < end; ++i) out(order[i], d) = rank;
      start = end;
    }
  }
  return out;
}

inline void sigmoid_pair(double x, double& pos, double& neg) {
  // pos = sigmoid(x), neg = sigmoid(-x), one exp.
  const double e = std::exp(-std::abs(x));
  const double big = 1.0 / (1.0 + e);
  const double small = e / (1.0 + e);
  if (x >= 0.0) {
    pos = big;
    neg = small;
  } else {
    pos = small;
    neg = big;
  }
}

}  // namespace

Matrix pseudo_observations(const Matrix& x) {
  if (x.rows() < 2) throw std::invalid_argument("pseudo_observations: need at least 2 rows");
  require_finite(x, "pseudo_observations input");
  return column_ranks(x);
}

Matrix hard_rank(const Matrix& y) {
  if (y.rows() < 2) throw std::invalid_argument("hard_rank: need at least 2 rows");
  return column_ranks(y);
}

bool is_unit_space(const Matrix& x) {
  return x.size() > 0 && (x.array() > 0.0).all() && (x.array() <= 1.0).all();
}

ColumnScale interquartile_range(std::span<const double> column) {
  ColumnScale scale;
  const Index m = static_cast<Index>(column.size());
  if (m < 2) return scale;
  const auto order = sorted_order(column.data(), m);
  auto quantile = [&](double p, Index* rows, double* weights, double sign) {
    const double h = static_cast<double>(m - 1) * p;
    const Index lo = static_cast<Index>(std::floor(h));
    const Index hi = std::min(lo + 1, m - 1);
    const double frac = h - static_cast<double>(lo);
    rows[0] = order[lo];
    rows[1] = order[hi];
    weights[0] = sign * (1.0 - frac);
    weights[1] = sign * frac;
    return column[order[lo]] + frac * (column[order[hi]] - column[order[lo]]);
  };
  const double q75 = quantile(0.75, scale.rows, scale.weights, 1.0);
  const double q25 = quantile(0.25, scale.rows + 2, scale.weights + 2, -1.0);
  const double iqr = q75 - q25;
  if (std::isfinite(iqr) && iqr > 0.0) {
    scale.value = iqr;
    scale.differentiable = true;
  } else {
    scale = ColumnScale{};
  }
  return scale;
}

Matrix softrank(const Matrix& y, const SoftrankOptions& options, SoftrankCache* cache) {
  if (!(options.alpha > 0.0)) throw std::invalid_argument("softrank: alpha must be positive");
  const Index m = y.rows();
  if (m < 2) throw std::invalid_argument("softrank: need at least 2 rows");
  require_finite(y, "softrank input");
  const Index dims = y.cols();
  const double inv_m = 1.0 / static_cast<double>(m);

  if (cache) {
    cache->input = y;
    cache->options = options;
    cache->scales.assign(static_cast<std::size_t>(dims), ColumnScale{});
    cache->sharpness.assign(static_cast<std::size_t>(dims), options.alpha);
    cache->sigmoid.assign(static_cast<std::size_t>(dims), Matrix());
  }

  Matrix v(m, dims);
  Matrix s;
  for (Index d = 0; d < dims; ++d) {
    const double* col = y.col(d).data();
    ColumnScale scale;
    if (options.scale_by_iqr) scale = interquartile_range(std::span<const double>(col, m));
    const double a = options.alpha / scale.value;

    s.resize(m, m);
    for (Index i = 0; i < m; ++i) {
      s(i, i) = 0.5;
      for (Index j = i + 1; j < m; ++j) sigmoid_pair(a * (col[i] - col[j]), s(i, j), s(j, i));
    }
    v.col(d) = (s.rowwise().sum().array() + 0.5) * inv_m;
    if (cache) {
      cache->scales[static_cast<std::size_t>(d)] = scale;
      cache->sharpness[static_cast<std::size_t>(d)] = a;
      cache->sigmoid[static_cast<std::size_t>(d)] = s;
    }
  }
  return v;
}

Matrix softrank_backward(const SoftrankCache& cache, const Matrix& d_output) {
  const Index m = cache.input.rows();
  const Index dims = cache.input.cols();
  if (d_output.rows() != m || d_output.cols() != dims) {
    throw std::invalid_argument("softrank_backward: gradient shape does not match the cached input");
  }
  if (cache.sigmoid.size() != static_cast<std::size_t>(dims)) {
    throw StaleCacheError("softrank_backward: cache was not filled by softrank");
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  Matrix grad = Matrix::Zero(m, dims);
  for (Index d = 0; d < dims; ++d) {
    const auto du = static_cast<std::size_t>(d);
    const Matrix& s = cache.sigmoid[du];
    if (s.rows() != m || s.cols() != m) throw StaleCacheError("softrank_backward: cache shape mismatch");
    const double a = cache.sharpness[du];
    const double* y = cache.input.col(d).data();
    const double* g = d_output.col(d).data();
    double* out = grad.col(d).data();
    double d_sharpness = 0.0;
    for (Index i = 0; i < m; ++i) {
      for (Index j = i + 1; j < m; ++j) {
        const double deriv = s(i, j) * s(j, i);
        const double diff_g = g[i] - g[j];
        const double flow = a * inv_m * deriv * diff_g;
        out[i] += flow;
        out[j] -= flow;
        d_sharpness += deriv * (y[i] - y[j]) * diff_g;
      }
    }
    const ColumnScale& scale = cache.scales[du];
    if (cache.options.scale_by_iqr && scale.differentiable) {
      // a = alpha / scale, so dL/dscale = -(a / scale) dL/da.
      const double d_scale = -(a / scale.value) * d_sharpness * inv_m;
      for (int k = 0; k < 4; ++k) out[scale.rows[k]] += d_scale * scale.weights[k];
    }
  }
  return grad;
}

// ---------------------------------------------------------------------------

PiecewiseLinearCdf::PiecewiseLinearCdf(std::vector<double> knots, std::vector<double> probs,
                                       double lower_clamp, double upper_clamp)
    : knots_(std::move(knots)), probs_(std::move(probs)), lower_(lower_clamp), upper_(upper_clamp) {
  if (knots_.empty() || knots_.size() != probs_.size()) {
    throw std::invalid_argument("PiecewiseLinearCdf: knots and probabilities must be non-empty and equally long");
  }
  for (std::size_t k = 0; k < knots_.size(); ++k) {
    if (!std::isfinite(knots_[k]) || !(probs_[k] >= 0.0 && probs_[k] <= 1.0)) {
      throw std::invalid_argument("PiecewiseLinearCdf: invalid knot " + std::to_string(k));
    }
    if (k > 0 && !(knots_[k] > knots_[k - 1] && probs_[k] > probs_[k - 1])) {
      throw std::invalid_argument("PiecewiseLinearCdf: knots and probabilities must be strictly increasing");
    }
  }
  if (!(lower_ <= probs_.front() && upper_ >= probs_.back() && lower_ >= 0.0 && upper_ <= 1.0)) {
    throw std::invalid_argument("PiecewiseLinearCdf: clamp bounds must enclose the knot probabilities");
  }
}

double PiecewiseLinearCdf::cdf(double y) const {
  if (knots_.empty()) throw std::logic_error("PiecewiseLinearCdf: empty");
  if (std::isnan(y)) throw NumericalError("cdf of NaN");
  if (y < knots_.front()) return lower_;
  if (y > knots_.back()) return upper_;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin());  // knots_[k-1] <= y
  if (knots_[k - 1] == y || k == knots_.size()) return probs_[k - 1];
  const double t = (y - knots_[k - 1]) / (knots_[k] - knots_[k - 1]);
  return probs_[k - 1] + t * (probs_[k] - probs_[k - 1]);
}

double PiecewiseLinearCdf::inverse(double u) const {
  if (knots_.empty()) throw std::logic_error("PiecewiseLinearCdf: empty");
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("inverse CDF argument must lie in (0, 1), got " + std::to_string(u));
  }
  if (u <= probs_.front()) return knots_.front();
  if (u >= probs_.back()) return knots_.back();
  const auto it = std::upper_bound(probs_.begin(), probs_.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - probs_.begin());
  if (probs_[k - 1] == u) return knots_[k - 1];
  const double t = (u - probs_[k - 1]) / (probs_[k] - probs_[k - 1]);
  return knots_[k - 1] + t * (knots_[k] - knots_[k - 1]);
}

MarginalCdfTable build_marginal_cdf_table(std::span<const double> samples, int knot_count,
                                          int dimension) {
  const auto t_count = static_cast<std::int64_t>(samples.size());
  if (knot_count < 2) throw std::invalid_argument("marginal table: need at least 2 knots");
  if (t_count < knot_count) {
    throw std::invalid_argument("marginal table: sample count T=" + std::to_string(t_count) +
                                " is smaller than knot count G=" + std::to_string(knot_count));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw NumericalError("marginal table: non-finite generator sample");
  }
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    throw std::invalid_argument("marginal table: dimension " + std::to_string(dimension) +
                                " is constant (zero-width support)");
  }
  const double t = static_cast<double>(t_count);
  std::vector<double> knots, probs;
  knots.reserve(static_cast<std::size_t>(knot_count));
  probs.reserve(static_cast<std::size_t>(knot_count));
  for (int k = 0; k < knot_count; ++k) {
    const auto pos = static_cast<std::int64_t>(std::llround(
        1.0 + static_cast<double>(k) * (t - 1.0) / static_cast<double>(knot_count - 1)));
    const double value = sorted[static_cast<std::size_t>(pos - 1)];
    // Ties take the largest order statistic of their group.
    const auto last = std::upper_bound(sorted.begin(), sorted.end(), value) - sorted.begin();
    const double p = (static_cast<double>(last) - 0.5) / t;
    if (!knots.empty() && knots.back() == value) continue;
    knots.push_back(value);
    probs.push_back(p);
  }
  MarginalCdfTable table;
  const double margin = 0.5 / t;
  table.cdf = PiecewiseLinearCdf(std::move(knots), std::move(probs), margin, 1.0 - margin);
  table.dimension = dimension;
  table.sample_count = t_count;
  return table;
}

double cdf_eval(const MarginalCdfTable& table, double y) {
  return std::clamp(table.cdf.cdf(y), table.boundary(), 1.0 - table.boundary());
}

double inverse_cdf_eval(const MarginalCdfTable& table, double u) { return table.cdf.inverse(u); }

PiecewiseLinearCdf empirical_marginal(std::span<const double> column) {
  if (column.empty()) throw std::invalid_argument("empirical marginal: empty column");
  std::vector<double> sorted(column.begin(), column.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw NumericalError("empirical marginal: non-finite value");
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> knots, probs;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    knots.push_back(sorted[i]);
    probs.push_back(static_cast<double>(i + 1) / n);
  }
  return PiecewiseLinearCdf(std::move(knots), std::move(probs), 0.0, 1.0);
}

double inverse_cdf_eval(const PiecewiseLinearCdf& cdf, double u) { return cdf.inverse(u); }

std::vector<PiecewiseLinearCdf> empirical_marginals(const Matrix& x) {
  std::vector<PiecewiseLinearCdf> out;
  out.reserve(static_cast<std::size_t>(x.cols()));
  for (Index d = 0; d < x.cols(); ++d) {
    out.push_back(empirical_marginal(std::span<const double>(x.col(d).data(), x.rows())));
  }
  return out;
}

}  // namespace igc
