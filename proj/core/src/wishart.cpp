#include "sipmix/wishart.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sipmix/rng.hpp"

namespace sipmix {

double log_multivariate_gamma(double a, int dim) {
  double s = 0.25 * dim * (dim - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < dim; ++j) s += std::lgamma(a - 0.5 * j);
  return s;
}

bool is_spd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if (!m.isApprox(m.transpose(), 1e-10)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

double inv_wishart_log_density(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& scale,
                               double dof) {
  const int d = static_cast<int>(sigma.rows());
  Eigen::LLT<Eigen::MatrixXd> sig(sigma);
  Eigen::LLT<Eigen::MatrixXd> sc(scale);
  if (sig.info() != Eigen::Success || sc.info() != Eigen::Success) {
    throw std::domain_error("inverse-Wishart density needs positive-definite matrices");
  }
  const double logdet_sigma =
      2.0 * sig.matrixLLT().diagonal().array().log().sum();
  const double logdet_scale = 2.0 * sc.matrixLLT().diagonal().array().log().sum();
  const double trace = (sig.solve(scale)).trace();
  return 0.5 * dof * logdet_scale - 0.5 * dof * d * std::numbers::ln2 -
         log_multivariate_gamma(0.5 * dof, d) - 0.5 * (dof + d + 1) * logdet_sigma -
         0.5 * trace;
}

Eigen::MatrixXd sample_inv_wishart(const Eigen::MatrixXd& scale, double dof, Rng& rng) {
  const int d = static_cast<int>(scale.rows());
  if (!(dof > d - 1)) throw std::invalid_argument("inverse-Wishart needs dof > D - 1");
  // Σ⁻¹ ~ W(V⁻¹, ν). With V⁻¹ = L Lᵀ, W = L A Aᵀ Lᵀ, so Σ = L⁻ᵀ (A Aᵀ)⁻¹ L⁻¹.
  const Eigen::MatrixXd inv_scale = scale.llt().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::LLT<Eigen::MatrixXd> llt(inv_scale);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("inverse-Wishart scale is not positive-definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(rng.chi_square(dof - i));
    for (int j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Eigen::MatrixXd la = l * a;
  // (L A)⁻¹ is lower-triangular; Σ = (L A)⁻ᵀ (L A)⁻¹.
  const Eigen::MatrixXd inv_la =
      la.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd sigma = inv_la.transpose() * inv_la;
  return 0.5 * (sigma + sigma.transpose());
}

GaussianKernel::GaussianKernel(Eigen::VectorXd mean, const Eigen::MatrixXd& sigma)
    : mean_(std::move(mean)), llt_(sigma) {
  if (llt_.info() != Eigen::Success) {
    throw std::domain_error("covariance matrix is not positive-definite");
  }
  const double d = static_cast<double>(sigma.rows());
  log_norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) -
              llt_.matrixLLT().diagonal().array().log().sum();
}

double GaussianKernel::log_density(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  return log_density_at(y, mean_);
}

double GaussianKernel::log_density_at(const Eigen::Ref<const Eigen::VectorXd>& y,
                                      const Eigen::Ref<const Eigen::VectorXd>& mean) const {
  const Eigen::VectorXd z = llt_.matrixL().solve(y - mean);
  return log_norm_ - 0.5 * z.squaredNorm();
}

}  // namespace sipmix
