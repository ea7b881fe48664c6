#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sipmix {

class Rng;

/// Which coordinates enter the Vandermonde-type product |Δw|.
enum class RepulsionSpan {
  ExcludeLast,  ///< pairs among the first M-1 entries (Selberg Dirichlet)
  All,          ///< pairs among all M entries (Gaussian ensemble style)
};

/// Parameters (α, γ, M) of the symmetric Selberg Dirichlet distribution.
struct SdirParams {
  double alpha = 1.0;
  double gamma = 0.0;
  int m = 2;

  void validate() const;
};

/// Component-specific concentrations plus a shared repulsion γ.
struct GsdirParams {
  std::vector<double> alphas;
  double gamma = 0.0;

  void validate() const;
};

/// A point on the probability simplex.
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-12;

  WeightVector() = default;
  /// Throws std::invalid_argument unless every entry lies in [0, 1] and the
  /// entries sum to one within kSumTolerance.
  explicit WeightVector(std::vector<double> w);

  static bool is_valid(std::span<const double> w);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  std::span<const double> values() const { return w_; }
  const std::vector<double>& vec() const { return w_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> w_;
};

/// Σ_{i<j} log|w_i - w_j| over the selected span; -inf on an exact tie.
double log_pairwise_repulsion(std::span<const double> w, RepulsionSpan span);

/// log D(α, γ, M), evaluated entirely through log-gamma.
double sdir_log_norm_const(const SdirParams& p);

/// Log-density of SDir(α, γ, M); -inf wherever the density vanishes.
double sdir_log_density(const WeightVector& w, const SdirParams& p);

/// Log-density of the (generalised) Dirichlet kernel with normalisation.
double dirichlet_log_density(std::span<const double> w, std::span<const double> alphas);

/// log A(α, β, γ, M). A(α, α, γ, M) = D(α, γ, M).
double mehta_log_A(double alpha, double beta, double gamma, int m);

/// Closed-form moments of SDir(α, γ, M).
///
/// Marginal quantities (mean, marginal_k_moment, second_moment, variance)
/// describe the last coordinate w_M, which is the one left out of the
/// repulsion product. The remaining M-1 coordinates are exchangeable and
/// share leading_mean = (1 - mean) / (M - 1).
struct SdirMoments {
  double eta = 0.0;  ///< αM + (M-1)(M-2)γ
  double mean = 0.0;
  double marginal_k_moment = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double product_moment_k = 0.0;  ///< E{Π w_i^k}
  double leading_mean = 0.0;
};

SdirMoments sdir_moments(const SdirParams& p, int k);

/// E{θ_τ(w)} = D(α, γ + τ/2, M) / D(α, γ, M).
double internal_dispersion_expectation(const SdirParams& p, double tau);

/// Unnormalised log-density of the generalised Selberg Dirichlet. Its
/// normalising constant has no known closed form; only ratios are meaningful.
double gsdir_log_density_unnorm(const WeightVector& w, const GsdirParams& p);

enum class SdirSampler {
  /// Exact i.i.d. draws: w_M ~ Beta(α, (M-1)α + (M-1)(M-2)γ) and the
  /// normalised leading block from a β-Laguerre tridiagonal model with β = 2γ.
  Tridiagonal,
  /// Independence Metropolis-Hastings with a symmetric Dirichlet(α) proposal.
  IndependenceMH,
};

struct SdirSamplingOptions {
  SdirSampler method = SdirSampler::Tridiagonal;
  int burn_in = 1000;  ///< IndependenceMH only
  int thin = 5;        ///< IndependenceMH only
};

std::vector<WeightVector> sample_sdir(const SdirParams& p, int n, Rng& rng,
                                      const SdirSamplingOptions& options = {});

namespace detail {
/// log D(α, γ, M) without parameter validation; defined for M >= 1
/// (D(α, γ, 1) = 1), which the trans-dimensional sampler relies on.
double sdir_log_norm_const_raw(double alpha, double gamma, int m);
}  // namespace detail

}  // namespace sipmix
