#include "igc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace igc {

namespace {

// Sum of Euclidean distances over all ordered pairs (a_i, b_j); points are columns.
double pairwise_distance_sum(const Matrix& a_t, const Matrix& b_t) {
  double total = 0.0;
  for (Index i = 0; i < a_t.cols(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < b_t.cols(); ++j) row += (a_t.col(i) - b_t.col(j)).norm();
    total += row;
  }
  return total;
}

double gaussian_kernel_sum(const Matrix& a_t, const Matrix& b_t, double inv_two_sigma2) {
  double total = 0.0;
  for (Index i = 0; i < a_t.cols(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < b_t.cols(); ++j) {
      row += std::exp(-(a_t.col(i) - b_t.col(j)).squaredNorm() * inv_two_sigma2);
    }
    total += row;
  }
  return total;
}

void check_unit_point(std::span<const double> w) {
  for (double x : w) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::domain_error("empirical copula evaluated outside the unit cube: " + std::to_string(x));
    }
  }
}

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Count of inserted positions < end.
  std::int64_t prefix(std::size_t end) const {
    std::int64_t s = 0;
    for (std::size_t i = end; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

Vector copula_cdf_sweep_2d(const Matrix& u, const Matrix& points) {
  const Index n = u.rows();
  const Index p = points.rows();
  std::vector<double> second(u.col(1).data(), u.col(1).data() + n);
  std::sort(second.begin(), second.end());

  std::vector<Index> by_first(static_cast<std::size_t>(n));
  std::iota(by_first.begin(), by_first.end(), Index{0});
  std::sort(by_first.begin(), by_first.end(), [&](Index a, Index b) { return u(a, 0) < u(b, 0); });
  std::vector<Index> queries(static_cast<std::size_t>(p));
  std::iota(queries.begin(), queries.end(), Index{0});
  std::sort(queries.begin(), queries.end(),
            [&](Index a, Index b) { return points(a, 0) < points(b, 0); });

  Fenwick tree(second.size());
  Vector out(p);
  std::size_t next = 0;
  for (Index q : queries) {
    const double w1 = points(q, 0);
    while (next < by_first.size() && u(by_first[next], 0) <= w1) {
      const double v = u(by_first[next], 1);
      // Equal values share a slot; any slot with value <= w2 is counted below.
      const auto slot = std::lower_bound(second.begin(), second.end(), v) - second.begin();
      tree.add(static_cast<std::size_t>(slot));
      ++next;
    }
    const auto end = std::upper_bound(second.begin(), second.end(), points(q, 1)) - second.begin();
    out(q) = static_cast<double>(tree.prefix(static_cast<std::size_t>(end))) / static_cast<double>(n);
  }
  return out;
}

}  // namespace

double energy_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() < 1 || b.rows() < 1) throw std::invalid_argument("energy_distance: empty sample");
  if (a.cols() != b.cols()) throw std::invalid_argument("energy_distance: dimension mismatch");
  const Matrix a_t = a.transpose();
  const Matrix b_t = b.transpose();
  const double na = static_cast<double>(a.rows());
  const double nb = static_cast<double>(b.rows());
  const double ab = pairwise_distance_sum(a_t, b_t) / (na * nb);
  const double aa = pairwise_distance_sum(a_t, a_t) / (na * na);
  const double bb = pairwise_distance_sum(b_t, b_t) / (nb * nb);
  return 2.0 * ab - aa - bb;
}

double empirical_copula_cdf(const Matrix& u, std::span<const double> w) {
  if (u.rows() < 1) throw std::invalid_argument("empirical copula: empty sample");
  if (static_cast<Index>(w.size()) != u.cols()) {
    throw std::invalid_argument("empirical copula: point dimension mismatch");
  }
  check_unit_point(w);
  Index count = 0;
  for (Index n = 0; n < u.rows(); ++n) {
    bool inside = true;
    for (Index d = 0; d < u.cols() && inside; ++d) inside = u(n, d) <= w[static_cast<std::size_t>(d)];
    count += inside ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(u.rows());
}

Vector empirical_copula_cdf_batch(const Matrix& u, const Matrix& points) {
  if (u.rows() < 1) throw std::invalid_argument("empirical copula: empty sample");
  if (points.cols() != u.cols()) throw std::invalid_argument("empirical copula: point dimension mismatch");
  for (Index q = 0; q < points.rows(); ++q) {
    for (Index d = 0; d < points.cols(); ++d) {
      const double x = points(q, d);
      if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("empirical copula evaluated outside the unit cube: " + std::to_string(x));
      }
    }
  }
  if (u.cols() == 2) return copula_cdf_sweep_2d(u, points);

  const Matrix u_t = u.transpose();
  const Index dims = u.cols();
  Vector out(points.rows());
  for (Index q = 0; q < points.rows(); ++q) {
    const Vector w = points.row(q).transpose();
    Index count = 0;
    for (Index n = 0; n < u_t.cols(); ++n) {
      const double* col = u_t.col(n).data();
      bool inside = true;
      for (Index d = 0; d < dims && inside; ++d) inside = col[d] <= w(d);
      count += inside ? 1 : 0;
    }
    out(q) = static_cast<double>(count) / static_cast<double>(u.rows());
  }
  return out;
}

double ise(const Matrix& data, const Matrix& model_samples, const CopulaCdf& reference,
           const IseOptions& options) {
  if (data.rows() < 1) throw std::invalid_argument("ise: no data points");
  if (model_samples.rows() < 1) throw std::invalid_argument("ise: no model samples");
  if (data.cols() != model_samples.cols()) throw std::invalid_argument("ise: dimension mismatch");
  if (data.cols() > 5 && !options.allow_high_dimension) {
    throw std::invalid_argument("ise: D = " + std::to_string(data.cols()) +
                                " > 5; empirical copula CDFs are unreliable here (override to force)");
  }
  const Vector model_cdf = empirical_copula_cdf_batch(model_samples, data);
  Vector data_cdf(data.rows());
  if (reference) {
    std::vector<double> w(static_cast<std::size_t>(data.cols()));
    for (Index n = 0; n < data.rows(); ++n) {
      for (Index d = 0; d < data.cols(); ++d) w[static_cast<std::size_t>(d)] = data(n, d);
      data_cdf(n) = reference(w);
    }
  } else {
    data_cdf = empirical_copula_cdf_batch(data, data);
  }
  return (data_cdf - model_cdf).squaredNorm() / static_cast<double>(data.rows());
}

double mmd_gaussian(const Matrix& a, const Matrix& b, double bandwidth) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("mmd_gaussian: bandwidth must be positive");
  if (a.rows() < 1 || b.rows() < 1) throw std::invalid_argument("mmd_gaussian: empty sample");
  if (a.cols() != b.cols()) throw std::invalid_argument("mmd_gaussian: dimension mismatch");
  const Matrix a_t = a.transpose();
  const Matrix b_t = b.transpose();
  const double scale = 1.0 / (2.0 * bandwidth * bandwidth);
  const double na = static_cast<double>(a.rows());
  const double nb = static_cast<double>(b.rows());
  const double kaa = gaussian_kernel_sum(a_t, a_t, scale) / (na * na);
  const double kbb = gaussian_kernel_sum(b_t, b_t, scale) / (nb * nb);
  const double kab = gaussian_kernel_sum(a_t, b_t, scale) / (na * nb);
  return kaa + kbb - 2.0 * kab;
}

double median_heuristic(const Matrix& pooled, Index cap) {
  if (pooled.rows() < 2) throw std::invalid_argument("median_heuristic: need at least 2 points");
  if (cap < 2) throw std::invalid_argument("median_heuristic: cap must be >= 2");
  const Index n = pooled.rows();
  const Index k = std::min(n, cap);
  Matrix pts(pooled.cols(), k);
  for (Index i = 0; i < k; ++i) pts.col(i) = pooled.row(i * n / k).transpose();
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(k * (k - 1) / 2));
  for (Index i = 0; i < k; ++i) {
    for (Index j = i + 1; j < k; ++j) dist.push_back((pts.col(i) - pts.col(j)).norm());
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) throw std::invalid_argument("median_heuristic: median pairwise distance is zero");
  return median;
}

double median_heuristic(const Matrix& a, const Matrix& b, Index cap) {
  if (a.cols() != b.cols()) throw std::invalid_argument("median_heuristic: dimension mismatch");
  Matrix pooled(a.rows() + b.rows(), a.cols());
  pooled << a, b;
  return median_heuristic(pooled, cap);
}

namespace {

// Sorts `v` ascending and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                         std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi), v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::int64_t tied_pairs(const std::vector<double>& sorted) {
  std::int64_t ties = 0;
  std::size_t start = 0;
  while (start < sorted.size()) {
    std::size_t end = start + 1;
    while (end < sorted.size() && sorted[end] == sorted[start]) ++end;
    const auto t = static_cast<std::int64_t>(end - start);
    ties += t * (t - 1) / 2;
    start = end;
  }
  return ties;
}

}  // namespace

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kendall_tau: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("kendall_tau: need at least 2 observations");
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(a[i]) || std::isnan(b[i])) throw NumericalError("kendall_tau: NaN input");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
  });

  // Ties in a, and joint ties in (a, b).
  std::int64_t ties_a = 0, ties_ab = 0;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && a[order[end]] == a[order[start]]) ++end;
    const auto t = static_cast<std::int64_t>(end - start);
    ties_a += t * (t - 1) / 2;
    std::size_t s2 = start;
    while (s2 < end) {
      std::size_t e2 = s2 + 1;
      while (e2 < end && b[order[e2]] == b[order[s2]]) ++e2;
      const auto t2 = static_cast<std::int64_t>(e2 - s2);
      ties_ab += t2 * (t2 - 1) / 2;
      s2 = e2;
    }
    start = end;
  }

  std::vector<double> seq(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) seq[i] = b[order[i]];
  const std::int64_t discordant = merge_count(seq, scratch, 0, n);
  const std::int64_t ties_b = tied_pairs(seq);

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t diff = total - ties_a - ties_b + ties_ab - 2 * discordant;
  return static_cast<double>(diff) / static_cast<double>(total);
}

Matrix kendall_tau_matrix(const Matrix& x) {
  const Index dims = x.cols();
  Matrix out = Matrix::Identity(dims, dims);
  for (Index i = 0; i < dims; ++i) {
    for (Index j = i + 1; j < dims; ++j) {
      const double t = kendall_tau(std::span<const double>(x.col(i).data(), x.rows()),
                                   std::span<const double>(x.col(j).data(), x.rows()));
      out(i, j) = t;
      out(j, i) = t;
    }
  }
  return out;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    stat = std::max({stat, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return stat;
}

double ks_uniform(std::span<const double> samples) {
  for (double x : samples) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::domain_error("ks_uniform: sample outside [0, 1]: " + std::to_string(x));
    }
  }
  return ks_statistic(samples, [](double x) { return x; });
}

Vector scott_bandwidths(const Matrix& train) {
  if (train.rows() < 2) throw std::invalid_argument("kde: need at least 2 training points");
  const double n = static_cast<double>(train.rows());
  Vector h(train.cols());
  for (Index d = 0; d < train.cols(); ++d) {
    const double mean = train.col(d).mean();
    const double var = (train.col(d).array() - mean).square().sum() / (n - 1.0);
    if (!(var > 0.0)) {
      throw std::invalid_argument("kde: training column " + std::to_string(d) + " has zero variance");
    }
    h(d) = std::sqrt(var) * std::pow(n, -1.0 / (static_cast<double>(train.cols()) + 4.0));
  }
  return h;
}

double kde_nll(const Matrix& train, const Matrix& test) {
  if (train.cols() != 2 || test.cols() != 2) throw std::invalid_argument("kde_nll: only D = 2 is supported");
  if (test.rows() < 1) throw std::invalid_argument("kde_nll: empty test set");
  require_finite(train, "kde_nll train");
  require_finite(test, "kde_nll test");
  const Vector h = scott_bandwidths(train);
  const Index n = train.rows();
  const double norm = 1.0 / (static_cast<double>(n) * 2.0 * std::numbers::pi * h(0) * h(1));
  std::vector<double> t0(static_cast<std::size_t>(n)), t1(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    t0[static_cast<std::size_t>(i)] = train(i, 0) / h(0);
    t1[static_cast<std::size_t>(i)] = train(i, 1) / h(1);
  }
  double total = 0.0;
  for (Index j = 0; j < test.rows(); ++j) {
    const double x0 = test(j, 0) / h(0);
    const double x1 = test(j, 1) / h(1);
    double acc = 0.0;
    for (std::size_t i = 0; i < t0.size(); ++i) {
      const double z0 = x0 - t0[i];
      const double z1 = x1 - t1[i];
      acc += std::exp(-0.5 * (z0 * z0 + z1 * z1));
    }
    total -= std::log(std::max(acc * norm, 1e-300));
  }
  return total / static_cast<double>(test.rows());
}

}  // namespace igc
