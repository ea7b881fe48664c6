#include "sipmix/ensemble.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sipmix/rng.hpp"
#include "sipmix/selberg.hpp"

namespace sipmix {

void GeParams::validate() const {
  if (!(zeta > 0.0)) throw std::invalid_argument("GE: zeta must be positive");
  if (m < 1) throw std::invalid_argument("GE: m must be at least 1");
}

namespace detail {
double ge_log_norm_const_raw(double zeta, int m) {
  const double md = static_cast<double>(m);
  double s = -(0.5 * md + zeta * md * (md - 1.0) / 4.0) * std::log(zeta) +
             0.5 * md * std::log(2.0 * std::numbers::pi);
  const double base = std::lgamma(1.0 + 0.5 * zeta);
  for (int j = 0; j < m; ++j) s += std::lgamma(1.0 + (j + 1) * 0.5 * zeta) - base;
  return s;
}
}  // namespace detail

double ge_log_norm_const(const GeParams& p) {
  p.validate();
  return detail::ge_log_norm_const_raw(p.zeta, p.m);
}

double ge_log_density(std::span<const double> x, const GeParams& p) {
  p.validate();
  if (static_cast<int>(x.size()) != p.m) {
    throw std::invalid_argument("GE: location vector length does not match m");
  }
  const double rep = log_pairwise_repulsion(x, RepulsionSpan::All);
  if (!std::isfinite(rep)) return rep;
  double sq = 0.0;
  for (double v : x) sq += v * v;
  return -0.5 * p.zeta * sq + p.zeta * rep - detail::ge_log_norm_const_raw(p.zeta, p.m);
}

std::vector<LocationVector> sample_ge(const GeParams& p, int n, Rng& rng) {
  p.validate();
  if (n < 1) throw std::invalid_argument("sample_ge: n must be positive");
  const int m = p.m;
  const double scale = 1.0 / std::sqrt(p.zeta);
  std::vector<LocationVector> out;
  out.reserve(n);

  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(std::max(m - 1, 0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  while (static_cast<int>(out.size()) < n) {
    // H = (1/√2) tridiag(N(0,2) diagonal, χ_{βk} off-diagonal, k = m-1..1).
    for (int i = 0; i < m; ++i) diag[i] = rng.normal();
    for (int i = 0; i + 1 < m; ++i) {
      sub[i] = std::sqrt(0.5 * rng.chi_square(p.zeta * (m - 1 - i)));
    }
    LocationVector x(m);
    if (m == 1) {
      x[0] = diag[0] * scale;
    } else {
      solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) continue;
      const Eigen::VectorXd& lambda = solver.eigenvalues();
      bool distinct = true;
      for (int i = 1; i < m; ++i) distinct = distinct && lambda[i] > lambda[i - 1];
      if (!distinct) continue;
      for (int i = 0; i < m; ++i) x[i] = lambda[i] * scale;
      rng.shuffle(x);
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace sipmix
