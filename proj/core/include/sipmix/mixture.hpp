#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "sipmix/selberg.hpp"

namespace sipmix {

class Rng;

/// Observations y_i stored row-wise (N × D). N = 0 is permitted for
/// prior-only runs; D is still carried by the column count.
struct Dataset {
  Eigen::MatrixXd y;

  int n() const { return static_cast<int>(y.rows()); }
  int dim() const { return static_cast<int>(y.cols()); }
  void validate() const;
};

/// Full MCMC state. Allocation labels are zero-based internally; files use
/// one-based labels.
struct MixtureState {
  WeightVector weights;
  Eigen::MatrixXd mus;                ///< M × D
  std::vector<Eigen::MatrixXd> sigmas;  ///< M matrices, each D × D
  std::vector<int> alloc;             ///< length N, entries in [0, M)
  double gamma = 0.0;
  double zeta = 1.0;

  int m() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(mus.cols()); }
  /// n_m for every component.
  std::vector<int> counts() const;
  int allocated() const;
  int non_allocated() const { return m() - allocated(); }

  /// Throws std::invalid_argument describing the first broken invariant.
  void validate(int n, int dim) const;
};

struct GammaHyper {
  double shape = 1.0;
  double rate = 1.0;

  double log_density(double x) const;
};

enum class ZetaMode { Fixed, Hyperprior, Ratio };
enum class CovarianceUpdate { Centered, Literal };

/// Fixed prior constants and tuning settings.
struct Hyperparams {
  double alpha0 = 1.0;
  double lambda = 3.0;
  Eigen::MatrixXd v0;  ///< empty means identity of the data dimension
  double nu0 = 0.0;    ///< 0 means the data dimension

  /// Initial (or fixed) γ. When gamma_prior is set γ is sampled.
  double gamma = 0.0;
  std::optional<GammaHyper> gamma_prior;

  ZetaMode zeta_mode = ZetaMode::Fixed;
  double zeta = 1.0;  ///< fixed value or initial value
  GammaHyper zeta_prior{1.0, 1.0};
  double rho = 1.0;   ///< ζ = ρ γ in ZetaMode::Ratio

  double q = 0.5;
  double step_mu = 0.25;
  double step_gamma = 0.25;
  bool adapt = true;
  CovarianceUpdate covariance_update = CovarianceUpdate::Centered;
  int initial_components = 0;  ///< 0 picks ceil(λ) + 1, capped at N

  int burn_in = 5000;
  int thin = 10;
  int n_samples = 5000;

  /// Fill v0/nu0 defaults (I_D, D) for the given dimension.
  Hyperparams resolved(int dim) const;
  void validate(int dim) const;
  bool gamma_free() const { return gamma_prior.has_value(); }
};

/// Σ_i log Σ_m w_m N(y_i | μ_m, Σ_m).
double log_likelihood(const Dataset& data, const MixtureState& s);

/// log p(y, c, μ, Σ, w, M, γ, ζ): the full hierarchy evaluated at one state.
/// -inf exactly when a repulsion term vanishes.
double log_complete_joint(const Dataset& data, const MixtureState& s, const Hyperparams& h);

/// log Poi₁(m; λ), i.e. m - 1 ~ Poisson(λ). -inf for m < 1.
double poi1_log_pmf(int m, double lambda);

struct LabelledDataset {
  Dataset data;
  std::vector<int> labels;  ///< zero-based true component
};

/// The five-component bivariate benchmark (N = 300).
LabelledDataset simulate_benchmark(std::uint64_t seed);

}  // namespace sipmix
