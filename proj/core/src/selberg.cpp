#include "sipmix/selberg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sipmix/rng.hpp"

namespace sipmix {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Σ_{j=1}^{M-1} [lnΓ(α + (j-1)γ) + lnΓ(1 + jγ) - lnΓ(1 + γ)]
double selberg_product_log(double alpha, double gamma, int m) {
  const double lg1g = std::lgamma(1.0 + gamma);
  double s = 0.0;
  for (int j = 1; j <= m - 1; ++j) {
    s += std::lgamma(alpha + (j - 1) * gamma) + std::lgamma(1.0 + j * gamma) - lg1g;
  }
  return s;
}

double pair_count_term(double gamma, int m) {
  return gamma * static_cast<double>(m - 1) * static_cast<double>(m - 2);
}

std::vector<double> leading_block_tridiagonal(double alpha, double gamma, int n, Rng& rng) {
  // β-Laguerre ensemble with β = 2γ and exponent α - 1 on each eigenvalue.
  const double beta = 2.0 * gamma;
  const double a = alpha + gamma * (n - 1);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (;;) {
    std::vector<double> b_diag(n);
    std::vector<double> b_sub(n, 0.0);
    for (int i = 0; i < n; ++i) {
      b_diag[i] = std::sqrt(rng.chi_square(2.0 * a - beta * i));
      if (i > 0) b_sub[i] = std::sqrt(rng.chi_square(beta * (n - i)));
    }
    for (int i = 0; i < n; ++i) {
      diag[i] = b_diag[i] * b_diag[i] + b_sub[i] * b_sub[i];
      if (i > 0) sub[i - 1] = b_sub[i] * b_diag[i - 1];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) continue;
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    // Eigenvalues come back sorted; a non-positive smallest one or a
    // repeated value is a rounding artefact of a measure-zero event.
    bool ok = lambda[0] > 0.0;
    for (int i = 1; ok && i < n; ++i) ok = lambda[i] > lambda[i - 1];
    if (!ok) continue;
    std::vector<double> u(lambda.data(), lambda.data() + n);
    const double total = std::accumulate(u.begin(), u.end(), 0.0);
    for (double& v : u) v /= total;
    rng.shuffle(u);
    return u;
  }
}

WeightVector draw_sdir_exact(const SdirParams& p, Rng& rng) {
  const int n = p.m - 1;
  const double last =
      rng.beta(p.alpha, (p.m - 1) * p.alpha + pair_count_term(p.gamma, p.m));
  std::vector<double> u;
  if (n == 1) {
    u = {1.0};
  } else if (p.gamma == 0.0) {
    const std::vector<double> alphas(n, p.alpha);
    u = rng.dirichlet(alphas);
  } else {
    u = leading_block_tridiagonal(p.alpha, p.gamma, n, rng);
  }
  std::vector<double> w(p.m);
  for (int i = 0; i < n; ++i) w[i] = (1.0 - last) * u[i];
  w[n] = last;
  return WeightVector(std::move(w));
}

std::vector<WeightVector> sample_sdir_mh(const SdirParams& p, int n, Rng& rng,
                                         const SdirSamplingOptions& options) {
  const std::vector<double> alphas(p.m, p.alpha);
  auto propose = [&] {
    return rng.dirichlet(alphas);
  };
  std::vector<double> current = propose();
  double current_rep = log_pairwise_repulsion(current, RepulsionSpan::ExcludeLast);
  while (p.gamma > 0.0 && !std::isfinite(current_rep)) {
    current = propose();
    current_rep = log_pairwise_repulsion(current, RepulsionSpan::ExcludeLast);
  }

  std::vector<WeightVector> out;
  out.reserve(n);
  const long total = static_cast<long>(options.burn_in) + static_cast<long>(n) * options.thin;
  for (long it = 1; it <= total; ++it) {
    std::vector<double> proposal = propose();
    const double rep = log_pairwise_repulsion(proposal, RepulsionSpan::ExcludeLast);
    const double log_ratio = p.gamma == 0.0 ? 0.0 : 2.0 * p.gamma * (rep - current_rep);
    if (std::isfinite(rep) || p.gamma == 0.0) {
      if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
        current = std::move(proposal);
        current_rep = rep;
      }
    }
    if (it > options.burn_in && (it - options.burn_in) % options.thin == 0) {
      out.emplace_back(current);
    }
  }
  return out;
}

}  // namespace

void SdirParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("SDir: alpha must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("SDir: gamma must be non-negative");
  if (m < 2) throw std::invalid_argument("SDir: dimension m must be at least 2");
}

void GsdirParams::validate() const {
  if (alphas.empty()) throw std::invalid_argument("GSDir: empty concentration vector");
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("GSDir: concentrations must be positive");
  }
  if (!(gamma >= 0.0)) throw std::invalid_argument("GSDir: gamma must be non-negative");
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  if (!is_valid(w_)) {
    throw std::invalid_argument("weights must lie in [0,1] and sum to one");
  }
}

bool WeightVector::is_valid(std::span<const double> w) {
  if (w.empty()) return false;
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
    total += v;
  }
  return std::abs(total - 1.0) <= kSumTolerance;
}

double log_pairwise_repulsion(std::span<const double> w, RepulsionSpan span) {
  std::size_t k = w.size();
  if (span == RepulsionSpan::ExcludeLast && k > 0) --k;
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double gap = std::abs(w[i] - w[j]);
      if (gap == 0.0) return kNegInf;
      s += std::log(gap);
    }
  }
  return s;
}

namespace detail {
double sdir_log_norm_const_raw(double alpha, double gamma, int m) {
  return std::lgamma(alpha) - std::lgamma(m * alpha + pair_count_term(gamma, m)) +
         selberg_product_log(alpha, gamma, m);
}
}  // namespace detail

double sdir_log_norm_const(const SdirParams& p) {
  p.validate();
  return detail::sdir_log_norm_const_raw(p.alpha, p.gamma, p.m);
}

double sdir_log_density(const WeightVector& w, const SdirParams& p) {
  p.validate();
  if (static_cast<int>(w.size()) != p.m) {
    throw std::invalid_argument("SDir: weight vector length does not match m");
  }
  std::vector<double> alphas(p.m, p.alpha);
  return gsdir_log_density_unnorm(w, GsdirParams{std::move(alphas), p.gamma}) -
         detail::sdir_log_norm_const_raw(p.alpha, p.gamma, p.m);
}

double dirichlet_log_density(std::span<const double> w, std::span<const double> alphas) {
  if (w.size() != alphas.size()) {
    throw std::invalid_argument("Dirichlet: dimension mismatch");
  }
  double total_alpha = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total_alpha += alphas[i];
    s -= std::lgamma(alphas[i]);
    if (alphas[i] != 1.0) s += (alphas[i] - 1.0) * std::log(w[i]);
  }
  return s + std::lgamma(total_alpha);
}

double mehta_log_A(double alpha, double beta, double gamma, int m) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("mehta_log_A: alpha and beta must be positive");
  }
  if (!(gamma >= 0.0)) throw std::invalid_argument("mehta_log_A: gamma must be non-negative");
  if (m < 2) throw std::invalid_argument("mehta_log_A: m must be at least 2");
  return std::lgamma(beta) - std::lgamma(alpha * (m - 1) + beta + pair_count_term(gamma, m)) +
         selberg_product_log(alpha, gamma, m);
}

SdirMoments sdir_moments(const SdirParams& p, int k) {
  p.validate();
  if (k < 1) throw std::invalid_argument("sdir_moments: k must be positive");
  SdirMoments out;
  const double a = p.alpha;
  const double eta = a * p.m + pair_count_term(p.gamma, p.m);
  out.eta = eta;
  out.mean = a / eta;
  out.marginal_k_moment =
      std::exp(std::lgamma(a + k) + std::lgamma(eta) - std::lgamma(a) - std::lgamma(eta + k));
  out.second_moment = a * (a + 1.0) / (eta * (eta + 1.0));
  out.variance = out.mean * (1.0 - out.mean) / (eta + 1.0);
  out.product_moment_k = std::exp(detail::sdir_log_norm_const_raw(a + k, p.gamma, p.m) -
                                  detail::sdir_log_norm_const_raw(a, p.gamma, p.m));
  out.leading_mean = (1.0 - out.mean) / (p.m - 1);
  return out;
}

double internal_dispersion_expectation(const SdirParams& p, double tau) {
  p.validate();
  if (!(tau >= 0.0)) throw std::invalid_argument("internal dispersion: tau must be >= 0");
  if (tau == 0.0) return 1.0;
  return std::exp(detail::sdir_log_norm_const_raw(p.alpha, p.gamma + 0.5 * tau, p.m) -
                  detail::sdir_log_norm_const_raw(p.alpha, p.gamma, p.m));
}

double gsdir_log_density_unnorm(const WeightVector& w, const GsdirParams& p) {
  p.validate();
  if (w.size() != p.alphas.size()) {
    throw std::invalid_argument("GSDir: weight vector length does not match alphas");
  }
  double repulsion = 0.0;
  if (p.gamma > 0.0) {
    repulsion = log_pairwise_repulsion(w.values(), RepulsionSpan::ExcludeLast);
    if (repulsion == kNegInf) return kNegInf;
  }
  double s = 2.0 * p.gamma * repulsion;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (p.alphas[i] != 1.0) s += (p.alphas[i] - 1.0) * std::log(w[i]);
  }
  return s;
}

std::vector<WeightVector> sample_sdir(const SdirParams& p, int n, Rng& rng,
                                      const SdirSamplingOptions& options) {
  p.validate();
  if (n < 1) throw std::invalid_argument("sample_sdir: n must be positive");
  if (options.method == SdirSampler::IndependenceMH) {
    if (options.burn_in < 0 || options.thin < 1) {
      throw std::invalid_argument("sample_sdir: burn_in >= 0 and thin >= 1 required");
    }
    return sample_sdir_mh(p, n, rng, options);
  }
  std::vector<WeightVector> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(draw_sdir_exact(p, rng));
  return out;
}

}  // namespace sipmix
