#pragma once

#include <Eigen/Dense>

namespace sipmix {

class Rng;

/// log Γ_D(a), the multivariate gamma function.
double log_multivariate_gamma(double a, int dim);

/// log IW(Σ | V, ν) with density ∝ |Σ|^{-(ν+D+1)/2} exp(-tr(V Σ⁻¹)/2).
double inv_wishart_log_density(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& scale,
                               double dof);

/// Draw from IW(V, ν) by inverting a Bartlett-decomposed Wishart(V⁻¹, ν).
/// Requires ν > D - 1 and V symmetric positive-definite.
Eigen::MatrixXd sample_inv_wishart(const Eigen::MatrixXd& scale, double dof, Rng& rng);

/// Multivariate normal log-density from a precomputed Cholesky factor.
class GaussianKernel {
 public:
  GaussianKernel() = default;
  /// Throws std::domain_error if sigma is not positive-definite.
  GaussianKernel(Eigen::VectorXd mean, const Eigen::MatrixXd& sigma);

  double log_density(const Eigen::Ref<const Eigen::VectorXd>& y) const;
  double log_density_at(const Eigen::Ref<const Eigen::VectorXd>& y,
                        const Eigen::Ref<const Eigen::VectorXd>& mean) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_norm_ = 0.0;
};

bool is_spd(const Eigen::MatrixXd& m);

}  // namespace sipmix
