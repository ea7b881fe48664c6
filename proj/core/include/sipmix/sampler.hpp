#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sipmix/mixture.hpp"
#include "sipmix/trace.hpp"

namespace sipmix {

class Rng;

struct SamplerConfig {
  Hyperparams hyperparams;
  std::uint64_t seed = 1;
  bool record_weights = false;
};

struct AcceptanceCounter {
  long proposed = 0;
  long accepted = 0;

  void record(bool ok) {
    ++proposed;
    if (ok) ++accepted;
  }
  double rate() const { return proposed == 0 ? 0.0 : static_cast<double>(accepted) / proposed; }
};

struct StepDiagnostics {
  AcceptanceCounter means;
  AcceptanceCounter weights;
  AcceptanceCounter gamma;
  AcceptanceCounter zeta;
  AcceptanceCounter birth;
  AcceptanceCounter death;
  int m = 0;
  int m_a = 0;
};

/// Proposal variances for the random-walk steps.
struct StepSizes {
  double mu = 0.25;
  double gamma = 0.25;
  double zeta = 0.25;
};

// Allocations.

/// Normalised log-probabilities of c_i over all M components.
std::vector<double> allocation_log_probs(const Dataset& data, const MixtureState& s, int i);
void update_allocations(const Dataset& data, MixtureState& s, Rng& rng);

// Locations and covariances.

/// log r for a Gaussian random-walk move of μ_{m,d} on an allocated component.
double allocated_mean_log_ratio(const Dataset& data, const MixtureState& s, int m, int d,
                                double proposed);
/// log r for an independence move μ_{m,d} ~ N(0, 1/ζ) on a non-allocated component.
double free_mean_log_ratio(const MixtureState& s, int m, int d, double proposed);
void update_means(const Dataset& data, MixtureState& s, double step_mu, Rng& rng,
                  StepDiagnostics& diag);
/// Σ_m ~ IW(V_post, n_m + ν₀); non-allocated components are redrawn from IW(V₀, ν₀).
void update_covariances(const Dataset& data, MixtureState& s, const Hyperparams& h, Rng& rng);

// Weights.

/// α₀ + n_m for every component.
std::vector<double> posterior_concentrations(const MixtureState& s, double alpha0);
/// log r for a Dirichlet(α_post) independence proposal.
double weights_log_ratio(const MixtureState& s, const WeightVector& proposed);
void update_weights(MixtureState& s, const Hyperparams& h, Rng& rng, StepDiagnostics& diag);

// Repulsion parameters. Every ratio includes the log-normal proposal
// correction.

double gamma_log_ratio(const MixtureState& s, const Hyperparams& h, double proposed);
void update_gamma(MixtureState& s, const Hyperparams& h, double step, Rng& rng,
                  StepDiagnostics& diag);
double zeta_log_ratio(const MixtureState& s, const Hyperparams& h, double proposed);
void update_zeta_full_conditional(MixtureState& s, const Hyperparams& h, double step, Rng& rng,
                                  StepDiagnostics& diag);
/// γ move with ζ = ργ tied to it.
double tied_gamma_log_ratio(const MixtureState& s, const Hyperparams& h, double proposed);
void update_gamma_ratio_tied(MixtureState& s, const Hyperparams& h, double step, Rng& rng,
                             StepDiagnostics& diag);

// Birth and death of non-allocated components.

/// A new component inserted at `position` (0..M) together with a fresh
/// weight vector for all M + 1 components.
struct BirthProposal {
  int position = 0;
  WeightVector weights;
  Eigen::VectorXd mean;
  Eigen::MatrixXd sigma;
};

/// Removal of non-allocated component `component` with fresh weights for
/// the M - 1 survivors.
struct DeathProposal {
  int component = 0;
  WeightVector weights;
};

/// log P(a birth is chosen) in state s: 0 when M_na = 0, log q otherwise.
double birth_move_log_prob(const MixtureState& s, const Hyperparams& h);
BirthProposal propose_birth(const MixtureState& s, const Hyperparams& h, Rng& rng);
/// Requires M_na >= 1.
DeathProposal propose_death(const MixtureState& s, const Hyperparams& h, Rng& rng);
double birth_log_acceptance(const MixtureState& s, const Hyperparams& h, const BirthProposal& b);
double death_log_acceptance(const MixtureState& s, const Hyperparams& h, const DeathProposal& d);
/// Labels at or above the insertion point shift up by one; the partition is unchanged.
MixtureState apply_birth(const MixtureState& s, const BirthProposal& b);
/// Labels above the removed component shift down by one.
MixtureState apply_death(const MixtureState& s, const DeathProposal& d);
void birth_death_step(MixtureState& s, const Hyperparams& h, Rng& rng, StepDiagnostics& diag);

// Driver.

MixtureState initial_state(const Dataset& data, const Hyperparams& h, Rng& rng);
/// One pass: allocations, means, covariances, weights, γ and ζ, birth or death.
void sweep(const Dataset& data, MixtureState& s, const Hyperparams& h, const StepSizes& steps,
           Rng& rng, StepDiagnostics& diag);

struct SamplerResult {
  PosteriorTrace trace;
  StepDiagnostics diagnostics;
  StepSizes final_steps;
};

/// Runs burn_in + n_samples * thin sweeps. Step sizes adapt toward a 20-40%
/// acceptance rate during burn-in only. Deterministic given the seed.
SamplerResult run_sampler(const Dataset& data, const SamplerConfig& config);

}  // namespace sipmix
