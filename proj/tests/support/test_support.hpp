#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sipmix::testing {

/// Adaptive Gauss-Kronrod on [a, b] with a relative error target; used as an
/// independent integration oracle. The integrand is never evaluated at a or b.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-11, unsigned max_depth = 20) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Mean and i.i.d. standard error.
inline MeanSe mean_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Mean with a batch-means standard error for autocorrelated chains.
inline MeanSe batch_mean_se(const std::vector<double>& x, int batches = 50) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) acc += x[i];
    means.push_back(acc / static_cast<double>(len));
  }
  const MeanSe m = mean_se(means);
  return {std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()), m.se};
}

/// Sample variance with the standard error of the variance estimator.
inline MeanSe variance_se(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  return {m2 * n / (n - 1.0), std::sqrt((m4 - m2 * m2) / n)};
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Critical value of the two-sample KS statistic at level 0.01.
inline double ks_critical_01(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / static_cast<double>(n * m));
}

/// ∫ over the 2-simplex of f(w1, w2, w3) using w = (r v, r (1 - v), 1 - r)
/// with r = sin²φ and v = sin²θ. The substitution keeps w^{-1/2} boundary
/// singularities bounded; endpoints are pulled in by 1e-13 so they are never
/// evaluated, and complements are formed as cos² to avoid cancellation. The inner split at v = 1/2 puts the |w1 - w2| kink on a panel edge.
inline double simplex_integral(const std::function<double(double, double, double)>& f,
                               double tol = 1e-10) {
  constexpr double kEdge = 1e-13;
  const double half_pi = 0.5 * std::acos(-1.0);
  auto inner = [&](double phi) {
    const double s = std::sin(phi), c = std::cos(phi);
    const double r = s * s;
    const double dr = 2.0 * s * c;
    auto g = [&](double theta) {
      const double st = std::sin(theta), ct = std::cos(theta);
      const double v = st * st;
      const double dv = 2.0 * st * ct;
      return f(r * v, r * ct * ct, c * c) * r * dv * dr;
    };
    return integrate(g, kEdge, 0.5 * half_pi, 1e-3 * tol) + integrate(g, 0.5 * half_pi, half_pi - kEdge, 1e-3 * tol);
  };
  return integrate(inner, kEdge, half_pi - kEdge, tol);
}

}  // namespace sipmix::testing
