#include "sipmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sipmix/ensemble.hpp"
#include "sipmix/rng.hpp"
#include "sipmix/wishart.hpp"

namespace sipmix {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
  const double hi = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

std::vector<GaussianKernel> component_kernels(const MixtureState& s) {
  std::vector<GaussianKernel> k;
  k.reserve(s.m());
  for (int m = 0; m < s.m(); ++m) k.emplace_back(s.mus.row(m).transpose(), s.sigmas[m]);
  return k;
}

}  // namespace

void Dataset::validate() const {
  if (dim() < 1) throw std::invalid_argument("dataset needs at least one column");
  if (!y.allFinite()) throw std::invalid_argument("dataset contains non-finite values");
}

std::vector<int> MixtureState::counts() const {
  std::vector<int> c(m(), 0);
  for (int a : alloc) ++c[a];
  return c;
}

int MixtureState::allocated() const {
  const auto c = counts();
  return static_cast<int>(std::count_if(c.begin(), c.end(), [](int v) { return v > 0; }));
}

void MixtureState::validate(int n, int d) const {
  const int mm = m();
  if (mm < 1) throw std::invalid_argument("state: needs at least one component");
  if (mus.rows() != mm || mus.cols() != d) {
    throw std::invalid_argument("state: means must be M x D");
  }
  if (static_cast<int>(sigmas.size()) != mm) {
    throw std::invalid_argument("state: one covariance per component required");
  }
  for (const auto& sg : sigmas) {
    if (sg.rows() != d || !is_spd(sg)) {
      throw std::invalid_argument("state: covariance is not symmetric positive-definite");
    }
  }
  if (static_cast<int>(alloc.size()) != n) {
    throw std::invalid_argument("state: allocation length must equal N");
  }
  for (int a : alloc) {
    if (a < 0 || a >= mm) throw std::invalid_argument("state: allocation label out of range");
  }
  if (!(gamma >= 0.0)) throw std::invalid_argument("state: gamma must be non-negative");
  if (!(zeta > 0.0)) throw std::invalid_argument("state: zeta must be positive");
}

double GammaHyper::log_density(double x) const {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

Hyperparams Hyperparams::resolved(int dim) const {
  Hyperparams h = *this;
  if (h.v0.size() == 0) h.v0 = Eigen::MatrixXd::Identity(dim, dim);
  if (h.nu0 == 0.0) h.nu0 = dim;
  return h;
}

void Hyperparams::validate(int dim) const {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const Hyperparams r = resolved(dim);
  if (r.v0.rows() != dim || !is_spd(r.v0)) {
    throw std::invalid_argument("v0 must be a D x D symmetric positive-definite matrix");
  }
  if (!(r.nu0 > dim - 1)) throw std::invalid_argument("nu0 must exceed D - 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (gamma_prior && !(gamma_prior->shape > 0.0 && gamma_prior->rate > 0.0)) {
    throw std::invalid_argument("gamma hyperprior shape and rate must be positive");
  }
  if (zeta_mode != ZetaMode::Ratio && !(zeta > 0.0)) {
    throw std::invalid_argument("zeta must be positive");
  }
  if (zeta_mode == ZetaMode::Hyperprior &&
      !(zeta_prior.shape > 0.0 && zeta_prior.rate > 0.0)) {
    throw std::invalid_argument("zeta hyperprior shape and rate must be positive");
  }
  if (zeta_mode == ZetaMode::Ratio) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    if (!gamma_prior && !(gamma > 0.0)) {
      throw std::invalid_argument("ratio mode with fixed gamma needs gamma > 0");
    }
  }
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  if (!(step_mu > 0.0) || !(step_gamma > 0.0)) {
    throw std::invalid_argument("MH step sizes must be positive");
  }
  if (burn_in < 0 || thin < 1 || n_samples < 1) {
    throw std::invalid_argument("need burn_in >= 0, thin >= 1, n_samples >= 1");
  }
  if (initial_components < 0) throw std::invalid_argument("initial_components must be >= 0");
}

double log_likelihood(const Dataset& data, const MixtureState& s) {
  const auto kernels = component_kernels(s);
  std::vector<double> terms(s.m());
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd yi = data.y.row(i).transpose();
    for (int m = 0; m < s.m(); ++m) {
      terms[m] = std::log(s.weights[m]) + kernels[m].log_density(yi);
    }
    total += log_sum_exp(terms);
  }
  return total;
}

double poi1_log_pmf(int m, double lambda) {
  if (m < 1) return kNegInf;
  return (m - 1) * std::log(lambda) - lambda - std::lgamma(static_cast<double>(m));
}

double log_complete_joint(const Dataset& data, const MixtureState& s, const Hyperparams& hp) {
  const int mm = s.m();
  const int d = s.dim();
  const Hyperparams h = hp.resolved(d);
  const auto kernels = component_kernels(s);

  double lp = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const int c = s.alloc[i];
    lp += kernels[c].log_density(data.y.row(i).transpose());
    lp += std::log(s.weights[c]);
  }

  const GeParams ge{s.zeta, mm};
  for (int k = 0; k < d; ++k) {
    const Eigen::VectorXd col = s.mus.col(k);
    lp += ge_log_density(std::span<const double>(col.data(), col.size()), ge);
  }

  for (const auto& sg : s.sigmas) lp += inv_wishart_log_density(sg, h.v0, h.nu0);

  // SDir(α₀, γ, M); M = 1 is the point mass on w = (1).
  if (mm >= 2) {
    lp += sdir_log_density(s.weights, SdirParams{h.alpha0, s.gamma, mm});
  }

  lp += poi1_log_pmf(mm, h.lambda);

  if (h.gamma_prior) lp += h.gamma_prior->log_density(s.gamma);
  if (h.zeta_mode == ZetaMode::Hyperprior) lp += h.zeta_prior.log_density(s.zeta);
  return lp;
}

LabelledDataset simulate_benchmark(std::uint64_t seed) {
  constexpr int kN = 300;
  const std::vector<double> w{0.2, 0.2, 0.2, 0.3, 0.1};
  const double mu[5][2] = {{-3.0, -2.5}, {-3.0, 3.0}, {3.0, -3.0}, {3.0, 3.0}, {-1.0, 0.0}};
  Eigen::Matrix2d shared;
  shared << 3.0, 1.0, 1.0, 3.0;
  const Eigen::Matrix2d small = 0.25 * Eigen::Matrix2d::Identity();

  std::vector<double> log_w(w.size());
  std::transform(w.begin(), w.end(), log_w.begin(), [](double v) { return std::log(v); });

  const Eigen::Matrix2d l_shared = shared.llt().matrixL();
  const Eigen::Matrix2d l_small = small.llt().matrixL();

  Rng rng(seed);
  LabelledDataset out;
  out.data.y.resize(kN, 2);
  out.labels.resize(kN);
  for (int i = 0; i < kN; ++i) {
    const int c = rng.categorical_log(log_w);
    const Eigen::Vector2d z(rng.normal(), rng.normal());
    const Eigen::Vector2d y = Eigen::Vector2d(mu[c][0], mu[c][1]) + (c == 4 ? l_small : l_shared) * z;
    out.data.y.row(i) = y.transpose();
    out.labels[i] = c;
  }
  return out;
}

}  // namespace sipmix
