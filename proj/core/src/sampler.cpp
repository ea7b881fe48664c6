#include "sipmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sipmix/ensemble.hpp"
#include "sipmix/kmeans.hpp"
#include "sipmix/rng.hpp"
#include "sipmix/wishart.hpp"

namespace sipmix {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kAdaptWindow = 50;

bool accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio) || log_ratio == kNegInf) return false;
  return log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
}

// Σ_{k≠m} log|x - μ_{k,d}|; -inf on a tie.
double cross_gap_log(const MixtureState& s, int m, int d, double x) {
  double acc = 0.0;
  for (int k = 0; k < s.m(); ++k) {
    if (k == m) continue;
    const double gap = std::abs(x - s.mus(k, d));
    if (gap == 0.0) return kNegInf;
    acc += std::log(gap);
  }
  return acc;
}

double column_log_repulsion(const MixtureState& s, int d) {
  const Eigen::VectorXd col = s.mus.col(d);
  return log_pairwise_repulsion(std::span<const double>(col.data(), col.size()),
                                RepulsionSpan::All);
}

// Terms of the SDir log-density that depend on γ: -log D(α₀, γ, M) + 2γ log|Δw|.
double sdir_gamma_terms(const MixtureState& s, double alpha0, double gamma, double log_delta) {
  if (s.m() < 2) return 0.0;
  const double rep = gamma == 0.0 ? 0.0 : 2.0 * gamma * log_delta;
  return rep - detail::sdir_log_norm_const_raw(alpha0, gamma, s.m());
}

// Σ_d of the ζ-dependent GE terms at locations s.mus.
double ge_zeta_terms(const MixtureState& s, double zeta) {
  double acc = 0.0;
  for (int d = 0; d < s.dim(); ++d) {
    const double rep = column_log_repulsion(s, d);
    acc += -0.5 * zeta * s.mus.col(d).squaredNorm() + zeta * rep -
           detail::ge_log_norm_const_raw(zeta, s.m());
  }
  return acc;
}

double log_delta_weights(const MixtureState& s) {
  return log_pairwise_repulsion(s.weights.values(), RepulsionSpan::ExcludeLast);
}

std::vector<std::vector<int>> members_by_component(const MixtureState& s) {
  std::vector<std::vector<int>> members(s.m());
  for (int i = 0; i < static_cast<int>(s.alloc.size()); ++i) members[s.alloc[i]].push_back(i);
  return members;
}

double allocated_mean_log_ratio_impl(const Dataset& data, const MixtureState& s, int m, int d,
                                     double proposed, const std::vector<int>& members,
                                     const GaussianKernel& kernel) {
  const double current = s.mus(m, d);
  const double gap_new = cross_gap_log(s, m, d, proposed);
  if (gap_new == kNegInf) return kNegInf;
  const double gap_old = cross_gap_log(s, m, d, current);
  double lr = -0.5 * s.zeta * (proposed * proposed - current * current) +
              s.zeta * (gap_new - gap_old);
  Eigen::VectorXd mu_old = s.mus.row(m).transpose();
  Eigen::VectorXd mu_new = mu_old;
  mu_new[d] = proposed;
  for (int i : members) {
    const Eigen::VectorXd yi = data.y.row(i).transpose();
    lr += kernel.log_density_at(yi, mu_new) - kernel.log_density_at(yi, mu_old);
  }
  return lr;
}

Eigen::MatrixXd draw_iw_with_jitter(const Eigen::MatrixXd& scale, double dof, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() == Eigen::Success) return sample_inv_wishart(scale, dof, rng);
  const Eigen::MatrixXd jittered =
      scale + 1e-10 * Eigen::MatrixXd::Identity(scale.rows(), scale.cols());
  return sample_inv_wishart(jittered, dof, rng);
}

void adapt(double& step, const AcceptanceCounter& window) {
  if (window.proposed == 0) return;
  const double rate = window.rate();
  if (rate < 0.2) step *= 0.7;
  else if (rate > 0.4) step *= 1.4;
  step = std::clamp(step, 1e-8, 1e4);
}

}  // namespace

// --------------------------------------------------------------- allocations

std::vector<double> allocation_log_probs(const Dataset& data, const MixtureState& s, int i) {
  std::vector<double> lp(s.m());
  const Eigen::VectorXd yi = data.y.row(i).transpose();
  for (int m = 0; m < s.m(); ++m) {
    const GaussianKernel k(s.mus.row(m).transpose(), s.sigmas[m]);
    lp[m] = std::log(s.weights[m]) + k.log_density(yi);
  }
  const double hi = *std::max_element(lp.begin(), lp.end());
  double total = 0.0;
  for (double v : lp) total += std::exp(v - hi);
  const double norm = hi + std::log(total);
  for (double& v : lp) v -= norm;
  return lp;
}

void update_allocations(const Dataset& data, MixtureState& s, Rng& rng) {
  std::vector<GaussianKernel> kernels;
  kernels.reserve(s.m());
  for (int m = 0; m < s.m(); ++m) kernels.emplace_back(s.mus.row(m).transpose(), s.sigmas[m]);
  std::vector<double> log_w(s.m());
  for (int m = 0; m < s.m(); ++m) log_w[m] = std::log(s.weights[m]);

  std::vector<double> lp(s.m());
  for (int i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd yi = data.y.row(i).transpose();
    for (int m = 0; m < s.m(); ++m) lp[m] = log_w[m] + kernels[m].log_density(yi);
    s.alloc[i] = rng.categorical_log(lp);
  }
}

// ------------------------------------------------- locations and covariances

double allocated_mean_log_ratio(const Dataset& data, const MixtureState& s, int m, int d,
                                double proposed) {
  std::vector<int> members;
  for (int i = 0; i < static_cast<int>(s.alloc.size()); ++i) {
    if (s.alloc[i] == m) members.push_back(i);
  }
  const GaussianKernel kernel(s.mus.row(m).transpose(), s.sigmas[m]);
  return allocated_mean_log_ratio_impl(data, s, m, d, proposed, members, kernel);
}

double free_mean_log_ratio(const MixtureState& s, int m, int d, double proposed) {
  const double gap_new = cross_gap_log(s, m, d, proposed);
  if (gap_new == kNegInf) return kNegInf;
  return s.zeta * (gap_new - cross_gap_log(s, m, d, s.mus(m, d)));
}

void update_means(const Dataset& data, MixtureState& s, double step_mu, Rng& rng,
                  StepDiagnostics& diag) {
  const auto members = members_by_component(s);
  const double rw_sd = std::sqrt(step_mu);
  const double prior_sd = 1.0 / std::sqrt(s.zeta);
  for (int m = 0; m < s.m(); ++m) {
    if (members[m].empty()) {
      for (int d = 0; d < s.dim(); ++d) {
        const double proposed = rng.normal(0.0, prior_sd);
        if (accept(free_mean_log_ratio(s, m, d, proposed), rng)) s.mus(m, d) = proposed;
      }
      continue;
    }
    const GaussianKernel kernel(s.mus.row(m).transpose(), s.sigmas[m]);
    for (int d = 0; d < s.dim(); ++d) {
      const double proposed = rng.normal(s.mus(m, d), rw_sd);
      const bool ok = accept(
          allocated_mean_log_ratio_impl(data, s, m, d, proposed, members[m], kernel), rng);
      diag.means.record(ok);
      if (ok) s.mus(m, d) = proposed;
    }
  }
}

void update_covariances(const Dataset& data, MixtureState& s, const Hyperparams& hp, Rng& rng) {
  const Hyperparams h = hp.resolved(s.dim());
  const auto members = members_by_component(s);
  for (int m = 0; m < s.m(); ++m) {
    if (members[m].empty()) {
      s.sigmas[m] = sample_inv_wishart(h.v0, h.nu0, rng);
      continue;
    }
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(s.dim(), s.dim());
    const Eigen::VectorXd mu = s.mus.row(m).transpose();
    for (int i : members[m]) {
      Eigen::VectorXd r = data.y.row(i).transpose();
      if (h.covariance_update == CovarianceUpdate::Centered) r -= mu;
      scatter.noalias() += r * r.transpose();
    }
    const double dof = h.nu0 + static_cast<double>(members[m].size());
    s.sigmas[m] = draw_iw_with_jitter(scatter + h.v0, dof, rng);
  }
}

// ------------------------------------------------------------------- weights

std::vector<double> posterior_concentrations(const MixtureState& s, double alpha0) {
  const auto n = s.counts();
  std::vector<double> a(n.size());
  for (std::size_t m = 0; m < n.size(); ++m) a[m] = alpha0 + n[m];
  return a;
}

double weights_log_ratio(const MixtureState& s, const WeightVector& proposed) {
  if (s.gamma == 0.0) return 0.0;
  const double rep_new = log_pairwise_repulsion(proposed.values(), RepulsionSpan::ExcludeLast);
  if (rep_new == kNegInf) return kNegInf;
  return 2.0 * s.gamma * (rep_new - log_delta_weights(s));
}

void update_weights(MixtureState& s, const Hyperparams& h, Rng& rng, StepDiagnostics& diag) {
  if (s.m() == 1) return;
  const auto alphas = posterior_concentrations(s, h.alpha0);
  std::vector<double> draw = rng.dirichlet(alphas);
  if (std::any_of(draw.begin(), draw.end(), [](double v) { return v <= 0.0; })) {
    diag.weights.record(false);
    return;
  }
  WeightVector proposed(std::move(draw));
  const bool ok = accept(weights_log_ratio(s, proposed), rng);
  diag.weights.record(ok);
  if (ok) s.weights = std::move(proposed);
}

// ------------------------------------------------------ repulsion parameters

double gamma_log_ratio(const MixtureState& s, const Hyperparams& h, double proposed) {
  if (!h.gamma_prior) throw std::logic_error("gamma update requires a gamma hyperprior");
  if (!(proposed > 0.0)) return kNegInf;
  const double ld = log_delta_weights(s);
  if (ld == kNegInf && s.m() >= 3) return kNegInf;
  const auto& g = *h.gamma_prior;
  return sdir_gamma_terms(s, h.alpha0, proposed, ld) - sdir_gamma_terms(s, h.alpha0, s.gamma, ld) +
         g.shape * std::log(proposed / s.gamma) - g.rate * (proposed - s.gamma);
}

void update_gamma(MixtureState& s, const Hyperparams& h, double step, Rng& rng,
                  StepDiagnostics& diag) {
  const double proposed = s.gamma * std::exp(std::sqrt(step) * rng.normal());
  const bool ok = accept(gamma_log_ratio(s, h, proposed), rng);
  diag.gamma.record(ok);
  if (ok) s.gamma = proposed;
}

double zeta_log_ratio(const MixtureState& s, const Hyperparams& h, double proposed) {
  if (!(proposed > 0.0)) return kNegInf;
  double lr = 0.0;
  for (int d = 0; d < s.dim(); ++d) {
    const double sq = s.mus.col(d).squaredNorm();
    const double rep = column_log_repulsion(s, d);
    if (rep == kNegInf) return kNegInf;
    lr += -detail::ge_log_norm_const_raw(proposed, s.m()) +
          detail::ge_log_norm_const_raw(s.zeta, s.m()) - 0.5 * (proposed - s.zeta) * sq +
          (proposed - s.zeta) * rep;
  }
  const auto& g = h.zeta_prior;
  return lr + g.shape * std::log(proposed / s.zeta) - g.rate * (proposed - s.zeta);
}

void update_zeta_full_conditional(MixtureState& s, const Hyperparams& h, double step, Rng& rng,
                                  StepDiagnostics& diag) {
  const double proposed = s.zeta * std::exp(std::sqrt(step) * rng.normal());
  const bool ok = accept(zeta_log_ratio(s, h, proposed), rng);
  diag.zeta.record(ok);
  if (ok) s.zeta = proposed;
}

double tied_gamma_log_ratio(const MixtureState& s, const Hyperparams& h, double proposed) {
  if (!h.gamma_prior) throw std::logic_error("tied gamma update requires a gamma hyperprior");
  if (!(proposed > 0.0)) return kNegInf;
  const double ld = log_delta_weights(s);
  if (ld == kNegInf && s.m() >= 3) return kNegInf;
  for (int d = 0; d < s.dim(); ++d) {
    if (column_log_repulsion(s, d) == kNegInf) return kNegInf;
  }
  const auto& g = *h.gamma_prior;
  return ge_zeta_terms(s, h.rho * proposed) - ge_zeta_terms(s, h.rho * s.gamma) +
         sdir_gamma_terms(s, h.alpha0, proposed, ld) - sdir_gamma_terms(s, h.alpha0, s.gamma, ld) +
         g.shape * std::log(proposed / s.gamma) - g.rate * (proposed - s.gamma);
}

void update_gamma_ratio_tied(MixtureState& s, const Hyperparams& h, double step, Rng& rng,
                             StepDiagnostics& diag) {
  const double proposed = s.gamma * std::exp(std::sqrt(step) * rng.normal());
  const bool ok = accept(tied_gamma_log_ratio(s, h, proposed), rng);
  diag.gamma.record(ok);
  if (ok) {
    s.gamma = proposed;
    s.zeta = h.rho * proposed;
  }
}

// ----------------------------------------------------------- birth and death

double birth_move_log_prob(const MixtureState& s, const Hyperparams& h) {
  return s.non_allocated() == 0 ? 0.0 : std::log(h.q);
}

BirthProposal propose_birth(const MixtureState& s, const Hyperparams& hp, Rng& rng) {
  const Hyperparams h = hp.resolved(s.dim());
  BirthProposal b;
  b.position = rng.uniform_int(s.m() + 1);
  std::vector<double> alphas = posterior_concentrations(s, h.alpha0);
  alphas.insert(alphas.begin() + b.position, h.alpha0);
  b.weights = WeightVector(rng.dirichlet(alphas));
  b.mean.resize(s.dim());
  const double sd = 1.0 / std::sqrt(s.zeta);
  for (int d = 0; d < s.dim(); ++d) b.mean[d] = rng.normal(0.0, sd);
  b.sigma = sample_inv_wishart(h.v0, h.nu0, rng);
  return b;
}

DeathProposal propose_death(const MixtureState& s, const Hyperparams& h, Rng& rng) {
  const auto n = s.counts();
  std::vector<int> empty;
  for (int m = 0; m < s.m(); ++m) {
    if (n[m] == 0) empty.push_back(m);
  }
  if (empty.empty()) throw std::logic_error("death move needs a non-allocated component");
  DeathProposal d;
  d.component = empty[rng.uniform_int(static_cast<int>(empty.size()))];
  if (s.m() == 1) {
    // Nothing survives; the move is rejected by its acceptance ratio.
    d.weights = WeightVector(std::vector<double>{1.0});
    return d;
  }
  std::vector<double> alphas = posterior_concentrations(s, h.alpha0);
  alphas.erase(alphas.begin() + d.component);
  d.weights = WeightVector(rng.dirichlet(alphas));
  return d;
}

double birth_log_acceptance(const MixtureState& s, const Hyperparams& hp, const BirthProposal& b) {
  const Hyperparams h = hp.resolved(s.dim());
  const int m = s.m();
  const int dim = s.dim();
  const int n_obs = static_cast<int>(s.alloc.size());
  const auto& w_new = b.weights.values();
  if (std::any_of(w_new.begin(), w_new.end(), [](double v) { return v <= 0.0; })) return kNegInf;

  // Poi₁(M+1) / Poi₁(M) = λ / M
  double la = std::log(h.lambda) - std::log(static_cast<double>(m));

  // SDir repulsion and constants; the w^{α₀-1} and categorical factors
  // cancel against the Dirichlet proposal kernels.
  if (s.gamma > 0.0) {
    const double rep_new = log_pairwise_repulsion(w_new, RepulsionSpan::ExcludeLast);
    if (rep_new == kNegInf) return kNegInf;
    la += 2.0 * s.gamma * (rep_new - log_delta_weights(s));
  }
  la += detail::sdir_log_norm_const_raw(h.alpha0, s.gamma, m) -
        detail::sdir_log_norm_const_raw(h.alpha0, s.gamma, m + 1);

  // GE ratio per dimension; exp(-ζμ²/2) cancels against the N(0, 1/ζ) proposal.
  for (int d = 0; d < dim; ++d) {
    const double gaps = cross_gap_log(s, -1, d, b.mean[d]);
    if (gaps == kNegInf) return kNegInf;
    la += detail::ge_log_norm_const_raw(s.zeta, m) -
          detail::ge_log_norm_const_raw(s.zeta, m + 1) + s.zeta * gaps;
  }
  la += 0.5 * dim * std::log(2.0 * std::numbers::pi / s.zeta);

  // Move probabilities: reverse death picks 1 of M_na + 1 empty components;
  // the birth picks 1 of M + 1 insertion slots.
  la += std::log1p(-h.q) - std::log(static_cast<double>(s.non_allocated() + 1)) -
        birth_move_log_prob(s, h) + std::log(static_cast<double>(m + 1));

  // Dirichlet normalising constants: Γ(α₀) Γ(Σα_post) / Γ(Σα̃).
  la += std::lgamma(h.alpha0) + std::lgamma(m * h.alpha0 + n_obs) -
        std::lgamma((m + 1) * h.alpha0 + n_obs);
  return la;
}

double death_log_acceptance(const MixtureState& s, const Hyperparams& hp, const DeathProposal& dp) {
  const Hyperparams h = hp.resolved(s.dim());
  const int m = s.m();
  if (m == 1) return kNegInf;
  const int dim = s.dim();
  const int n_obs = static_cast<int>(s.alloc.size());
  const int j = dp.component;
  const auto& w_new = dp.weights.values();
  if (std::any_of(w_new.begin(), w_new.end(), [](double v) { return v <= 0.0; })) return kNegInf;

  double la = std::log(static_cast<double>(m - 1)) - std::log(h.lambda);

  if (s.gamma > 0.0) {
    const double rep_new = log_pairwise_repulsion(w_new, RepulsionSpan::ExcludeLast);
    if (rep_new == kNegInf) return kNegInf;
    la += 2.0 * s.gamma * (rep_new - log_delta_weights(s));
  }
  la += detail::sdir_log_norm_const_raw(h.alpha0, s.gamma, m) -
        detail::sdir_log_norm_const_raw(h.alpha0, s.gamma, m - 1);

  for (int d = 0; d < dim; ++d) {
    la += detail::ge_log_norm_const_raw(s.zeta, m) -
          detail::ge_log_norm_const_raw(s.zeta, m - 1) -
          s.zeta * cross_gap_log(s, j, d, s.mus(j, d));
  }
  la -= 0.5 * dim * std::log(2.0 * std::numbers::pi / s.zeta);

  const int empty_after = s.non_allocated() - 1;
  const double reverse_birth = empty_after == 0 ? 0.0 : std::log(h.q);
  la += reverse_birth - std::log(static_cast<double>(m)) - std::log1p(-h.q) +
        std::log(static_cast<double>(s.non_allocated()));

  la -= std::lgamma(h.alpha0) + std::lgamma((m - 1) * h.alpha0 + n_obs) -
        std::lgamma(m * h.alpha0 + n_obs);
  return la;
}

MixtureState apply_birth(const MixtureState& s, const BirthProposal& b) {
  const int m = s.m();
  const int p = b.position;
  MixtureState out;
  out.weights = b.weights;
  out.mus.resize(m + 1, s.dim());
  out.mus.topRows(p) = s.mus.topRows(p);
  out.mus.row(p) = b.mean.transpose();
  out.mus.bottomRows(m - p) = s.mus.bottomRows(m - p);
  out.sigmas = s.sigmas;
  out.sigmas.insert(out.sigmas.begin() + p, b.sigma);
  out.alloc = s.alloc;
  for (int& a : out.alloc) {
    if (a >= p) ++a;
  }
  out.gamma = s.gamma;
  out.zeta = s.zeta;
  return out;
}

MixtureState apply_death(const MixtureState& s, const DeathProposal& d) {
  const int m = s.m();
  const int j = d.component;
  MixtureState out;
  out.weights = d.weights;
  out.mus.resize(m - 1, s.dim());
  out.mus.topRows(j) = s.mus.topRows(j);
  out.mus.bottomRows(m - 1 - j) = s.mus.bottomRows(m - 1 - j);
  out.sigmas = s.sigmas;
  out.sigmas.erase(out.sigmas.begin() + j);
  out.alloc = s.alloc;
  for (int& a : out.alloc) {
    if (a > j) --a;
  }
  out.gamma = s.gamma;
  out.zeta = s.zeta;
  return out;
}

void birth_death_step(MixtureState& s, const Hyperparams& h, Rng& rng, StepDiagnostics& diag) {
  const bool birth = s.non_allocated() == 0 || rng.uniform() < h.q;
  if (birth) {
    const BirthProposal b = propose_birth(s, h, rng);
    const bool ok = accept(birth_log_acceptance(s, h, b), rng);
    diag.birth.record(ok);
    if (ok) s = apply_birth(s, b);
  } else {
    const DeathProposal d = propose_death(s, h, rng);
    const bool ok = accept(death_log_acceptance(s, h, d), rng);
    diag.death.record(ok);
    if (ok) s = apply_death(s, d);
  }
}

// -------------------------------------------------------------------- driver

MixtureState initial_state(const Dataset& data, const Hyperparams& hp, Rng& rng) {
  const int dim = data.dim();
  const Hyperparams h = hp.resolved(dim);
  const int n = data.n();
  int m0 = h.initial_components > 0 ? h.initial_components
                                    : static_cast<int>(std::ceil(h.lambda)) + 1;
  if (n > 0) m0 = std::min(m0, n);

  MixtureState s;
  s.gamma = h.gamma;
  if (h.gamma_prior && !(s.gamma > 0.0)) s.gamma = h.gamma_prior->shape / h.gamma_prior->rate;
  s.zeta = h.zeta_mode == ZetaMode::Ratio ? h.rho * s.gamma : h.zeta;

  s.mus.resize(m0, dim);
  s.alloc.assign(n, 0);
  if (n > 0) {
    KMeansOptions opts;
    opts.restarts = 3;
    const KMeansResult km = kmeans(data.y, m0, rng, opts);
    s.mus = km.centers;
    s.alloc = km.labels;
    // Nudge centres so no two share a coordinate in any dimension.
    for (int m = 0; m < m0; ++m) {
      for (int d = 0; d < dim; ++d) s.mus(m, d) += 1e-6 * rng.normal();
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(dim, dim);
    if (n > dim) {
      const Eigen::RowVectorXd mean = data.y.colwise().mean();
      const Eigen::MatrixXd centred = data.y.rowwise() - mean;
      cov = centred.transpose() * centred / static_cast<double>(n - 1);
      cov += 1e-6 * Eigen::MatrixXd::Identity(dim, dim);
    }
    s.sigmas.assign(m0, cov);
  } else {
    const auto draws = sample_ge(GeParams{s.zeta, m0}, dim, rng);
    for (int d = 0; d < dim; ++d) {
      for (int m = 0; m < m0; ++m) s.mus(m, d) = draws[d][m];
    }
    for (int m = 0; m < m0; ++m) s.sigmas.push_back(sample_inv_wishart(h.v0, h.nu0, rng));
  }
  std::vector<double> alphas(m0);
  std::vector<int> counts(m0, 0);
  for (int a : s.alloc) ++counts[a];
  for (int m = 0; m < m0; ++m) alphas[m] = h.alpha0 + counts[m];
  for (;;) {
    std::vector<double> w = rng.dirichlet(alphas);
    if (std::all_of(w.begin(), w.end(), [](double v) { return v > 0.0; }) &&
        (m0 < 3 || std::isfinite(log_pairwise_repulsion(w, RepulsionSpan::ExcludeLast)))) {
      s.weights = WeightVector(std::move(w));
      break;
    }
  }
  return s;
}

void sweep(const Dataset& data, MixtureState& s, const Hyperparams& h, const StepSizes& steps,
           Rng& rng, StepDiagnostics& diag) {
  update_allocations(data, s, rng);
  update_means(data, s, steps.mu, rng, diag);
  update_covariances(data, s, h, rng);
  update_weights(s, h, rng, diag);
  if (h.zeta_mode == ZetaMode::Ratio) {
    if (h.gamma_free()) update_gamma_ratio_tied(s, h, steps.gamma, rng, diag);
  } else {
    if (h.gamma_free()) update_gamma(s, h, steps.gamma, rng, diag);
    if (h.zeta_mode == ZetaMode::Hyperprior) {
      update_zeta_full_conditional(s, h, steps.zeta, rng, diag);
    }
  }
  birth_death_step(s, h, rng, diag);
}

SamplerResult run_sampler(const Dataset& data, const SamplerConfig& config) {
  data.validate();
  const Hyperparams h = config.hyperparams.resolved(data.dim());
  h.validate(data.dim());

  Rng rng(config.seed);
  MixtureState s = initial_state(data, h, rng);
  StepSizes steps{h.step_mu, h.step_gamma, h.step_gamma};

  SamplerResult result;
  result.trace.samples.reserve(h.n_samples);
  StepDiagnostics window;
  const long total = static_cast<long>(h.burn_in) + static_cast<long>(h.n_samples) * h.thin;
  for (long it = 1; it <= total; ++it) {
    const bool burning = it <= h.burn_in;
    StepDiagnostics& sink = burning ? window : result.diagnostics;
    try {
      sweep(data, s, h, steps, rng, sink);
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep " + std::to_string(it) + ": " + e.what());
    }
    if (burning) {
      if (h.adapt && it % kAdaptWindow == 0) {
        adapt(steps.mu, window.means);
        adapt(steps.gamma, window.gamma);
        adapt(steps.zeta, window.zeta);
        window = StepDiagnostics{};
      }
      continue;
    }
    if ((it - h.burn_in) % h.thin != 0) continue;
    TraceSample t;
    t.m = s.m();
    t.m_a = s.allocated();
    t.alloc = s.alloc;
    t.gamma = s.gamma;
    t.zeta = s.zeta;
    if (config.record_weights) t.weights = s.weights.vec();
    result.trace.samples.push_back(std::move(t));
  }
  result.diagnostics.m = s.m();
  result.diagnostics.m_a = s.allocated();
  result.final_steps = steps;
  return result;
}

}  // namespace sipmix
