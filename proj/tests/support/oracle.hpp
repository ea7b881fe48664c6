#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "sipmix/mixture.hpp"
#include "sipmix/rng.hpp"
#include "sipmix/sampler.hpp"
#include "sipmix/selberg.hpp"
#include "sipmix/wishart.hpp"

// Acceptance ratios rebuilt from the complete joint density and explicit
// proposal densities, independently of the sampler's simplified formulas.
namespace sipmix::testing {

struct Scenario {
  Dataset data;
  MixtureState state;
  Hyperparams hyper;
};

inline double normal_log_pdf(double x, double mean, double var) {
  return -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * (x - mean) * (x - mean) / var;
}

/// A random state with some empty components. n may be 0.
inline Scenario random_scenario(Rng& rng, int n = 12, int dim = 2, int max_m = 6) {
  Scenario sc;
  sc.data.y.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) sc.data.y(i, d) = 2.0 * rng.normal();
  }
  const int m = 1 + rng.uniform_int(max_m);
  MixtureState& s = sc.state;
  for (;;) {
    std::vector<double> w = rng.dirichlet(std::vector<double>(m, 1.0));
    if (std::all_of(w.begin(), w.end(), [](double v) { return v > 1e-6; })) {
      s.weights = WeightVector(std::move(w));
      break;
    }
  }
  s.mus.resize(m, dim);
  for (int k = 0; k < m; ++k) {
    for (int d = 0; d < dim; ++d) s.mus(k, d) = 1.5 * rng.normal();
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  for (int k = 0; k < m; ++k) s.sigmas.push_back(sample_inv_wishart(id, dim + 2.0, rng));
  // Allocate only to a random prefix of a shuffled label set so empties exist.
  const int used = 1 + rng.uniform_int(m);
  std::vector<double> order(m);
  for (int k = 0; k < m; ++k) order[k] = k;
  rng.shuffle(order);
  s.alloc.resize(n);
  for (int i = 0; i < n; ++i) s.alloc[i] = static_cast<int>(order[rng.uniform_int(used)]);
  s.gamma = 0.1 + 2.0 * rng.uniform();
  s.zeta = 0.2 + 2.0 * rng.uniform();

  Hyperparams& h = sc.hyper;
  h.alpha0 = 0.5 + 2.0 * rng.uniform();
  h.lambda = 1.0 + 4.0 * rng.uniform();
  h.q = 0.2 + 0.6 * rng.uniform();
  h.gamma = s.gamma;
  h.zeta = s.zeta;
  h.v0 = (1.0 + rng.uniform()) * id;
  h.nu0 = dim + 1.0;
  return sc;
}

inline double joint_diff(const Scenario& sc, const MixtureState& next) {
  return log_complete_joint(sc.data, next, sc.hyper) - log_complete_joint(sc.data, sc.state, sc.hyper);
}

inline double oracle_allocated_mean(const Scenario& sc, int m, int d, double proposed) {
  MixtureState t = sc.state;
  t.mus(m, d) = proposed;
  return joint_diff(sc, t);  // symmetric random walk
}

inline double oracle_free_mean(const Scenario& sc, int m, int d, double proposed) {
  MixtureState t = sc.state;
  t.mus(m, d) = proposed;
  const double var = 1.0 / sc.state.zeta;
  return joint_diff(sc, t) + normal_log_pdf(sc.state.mus(m, d), 0.0, var) -
         normal_log_pdf(proposed, 0.0, var);
}

inline std::vector<double> post_alphas(const MixtureState& s, double alpha0) {
  std::vector<double> a;
  for (int c : s.counts()) a.push_back(alpha0 + c);
  return a;
}

inline double oracle_weights(const Scenario& sc, const WeightVector& proposed) {
  MixtureState t = sc.state;
  t.weights = proposed;
  const auto a = post_alphas(sc.state, sc.hyper.alpha0);
  return joint_diff(sc, t) + dirichlet_log_density(sc.state.weights.values(), a) -
         dirichlet_log_density(proposed.values(), a);
}

inline double oracle_gamma(const Scenario& sc, double proposed) {
  MixtureState t = sc.state;
  t.gamma = proposed;
  return joint_diff(sc, t) + std::log(proposed) - std::log(sc.state.gamma);
}

inline double oracle_zeta(const Scenario& sc, double proposed) {
  MixtureState t = sc.state;
  t.zeta = proposed;
  return joint_diff(sc, t) + std::log(proposed) - std::log(sc.state.zeta);
}

/// Requires sc.state.zeta == rho * sc.state.gamma.
inline double oracle_tied(const Scenario& sc, double proposed) {
  MixtureState t = sc.state;
  t.gamma = proposed;
  t.zeta = sc.hyper.rho * proposed;
  return joint_diff(sc, t) + std::log(proposed) - std::log(sc.state.gamma);
}

inline double birth_choice_log_prob(const MixtureState& s, double q) {
  return s.non_allocated() == 0 ? 0.0 : std::log(q);
}

/// log q(s' -> s) - log q(s -> s') for a birth s -> s' plus the joint ratio.
inline double oracle_birth(const Scenario& sc, const BirthProposal& b) {
  const MixtureState& s = sc.state;
  const Hyperparams h = sc.hyper.resolved(s.dim());
  const MixtureState t = apply_birth(s, b);
  std::vector<double> a_new = post_alphas(s, h.alpha0);
  a_new.insert(a_new.begin() + b.position, h.alpha0);

  double fwd = birth_choice_log_prob(s, h.q) - std::log(s.m() + 1.0) +
               dirichlet_log_density(b.weights.values(), a_new) +
               inv_wishart_log_density(b.sigma, h.v0, h.nu0);
  for (int d = 0; d < s.dim(); ++d) fwd += normal_log_pdf(b.mean[d], 0.0, 1.0 / s.zeta);

  double rev = std::log1p(-h.q) - std::log(static_cast<double>(t.non_allocated()));
  if (s.m() > 1) rev += dirichlet_log_density(s.weights.values(), post_alphas(s, h.alpha0));
  return joint_diff(sc, t) + rev - fwd;
}

/// The reverse of oracle_birth for a death s -> s'.
inline double oracle_death(const Scenario& sc, const DeathProposal& dp) {
  const MixtureState& s = sc.state;
  const Hyperparams h = sc.hyper.resolved(s.dim());
  const MixtureState t = apply_death(s, dp);
  const int j = dp.component;

  double fwd = std::log1p(-h.q) - std::log(static_cast<double>(s.non_allocated()));
  if (t.m() > 1) fwd += dirichlet_log_density(dp.weights.values(), post_alphas(t, h.alpha0));

  double rev = birth_choice_log_prob(t, h.q) - std::log(static_cast<double>(s.m())) +
               dirichlet_log_density(s.weights.values(), post_alphas(s, h.alpha0)) +
               inv_wishart_log_density(s.sigmas[j], h.v0, h.nu0);
  for (int d = 0; d < s.dim(); ++d) rev += normal_log_pdf(s.mus(j, d), 0.0, 1.0 / s.zeta);
  return joint_diff(sc, t) + rev - fwd;
}

/// True when both are -inf or they agree within tol.
inline bool same_log_ratio(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol;
}

}  // namespace sipmix::testing
