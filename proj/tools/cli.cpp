#include "cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sipmix/analysis.hpp"
#include "sipmix/ensemble.hpp"
#include "sipmix/io.hpp"
#include "sipmix/rng.hpp"
#include "sipmix/sampler.hpp"
#include "sipmix/selberg.hpp"
#include "sipmix/version.hpp"

namespace fs = std::filesystem;

namespace sipmix {
namespace {

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

struct FitOverrides {
  std::optional<double> alpha0, lambda, nu0, gamma, gamma_shape, gamma_rate, zeta, zeta_shape,
      zeta_rate, rho, q, step_mu, step_gamma;
  std::optional<std::string> gamma_mode, zeta_mode, covariance_update;
  std::optional<int> burn_in, thin, n_samples, chains, initial_components;
  std::optional<std::uint64_t> seed;
  bool record_weights = false;
  bool no_adapt = false;
};

void add_fit_flags(CLI::App* cmd, FitOverrides& o) {
  cmd->add_option("--alpha0", o.alpha0, "Dirichlet concentration");
  cmd->add_option("--lambda", o.lambda, "shifted Poisson rate for M");
  cmd->add_option("--nu0", o.nu0, "inverse-Wishart degrees of freedom");
  cmd->add_option("--gamma", o.gamma, "weight repulsion (fixed or initial)");
  cmd->add_option("--gamma-mode", o.gamma_mode, "fixed | hyperprior")
      ->check(CLI::IsMember({"fixed", "hyperprior"}));
  cmd->add_option("--gamma-prior-shape", o.gamma_shape);
  cmd->add_option("--gamma-prior-rate", o.gamma_rate);
  cmd->add_option("--zeta-mode", o.zeta_mode, "fixed | hyperprior | ratio")
      ->check(CLI::IsMember({"fixed", "hyperprior", "ratio"}));
  cmd->add_option("--zeta", o.zeta, "location repulsion (fixed or initial)");
  cmd->add_option("--zeta-prior-shape", o.zeta_shape);
  cmd->add_option("--zeta-prior-rate", o.zeta_rate);
  cmd->add_option("--rho", o.rho, "zeta / gamma in ratio mode");
  cmd->add_option("--q", o.q, "birth probability");
  cmd->add_option("--step-mu", o.step_mu);
  cmd->add_option("--step-gamma", o.step_gamma);
  cmd->add_option("--covariance-update", o.covariance_update, "centered | literal")
      ->check(CLI::IsMember({"centered", "literal"}));
  cmd->add_option("--initial-components", o.initial_components);
  cmd->add_option("--burn-in", o.burn_in);
  cmd->add_option("--thin", o.thin);
  cmd->add_option("--n-samples", o.n_samples);
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--chains", o.chains);
  cmd->add_flag("--record-weights", o.record_weights);
  cmd->add_flag("--no-adapt", o.no_adapt);
}

RunConfig apply_overrides(RunConfig c, const FitOverrides& o) {
  Hyperparams& h = c.hyperparams;
  auto set = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  set(h.alpha0, o.alpha0);
  set(h.lambda, o.lambda);
  set(h.nu0, o.nu0);
  set(h.gamma, o.gamma);
  set(h.zeta, o.zeta);
  set(h.zeta_prior.shape, o.zeta_shape);
  set(h.zeta_prior.rate, o.zeta_rate);
  set(h.rho, o.rho);
  set(h.q, o.q);
  set(h.step_mu, o.step_mu);
  set(h.step_gamma, o.step_gamma);
  set(h.initial_components, o.initial_components);
  set(h.burn_in, o.burn_in);
  set(h.thin, o.thin);
  set(h.n_samples, o.n_samples);
  set(c.seed, o.seed);
  set(c.chains, o.chains);
  if (o.record_weights) c.record_weights = true;
  if (o.no_adapt) h.adapt = false;
  if (o.zeta_mode) {
    h.zeta_mode = *o.zeta_mode == "fixed"        ? ZetaMode::Fixed
                  : *o.zeta_mode == "hyperprior" ? ZetaMode::Hyperprior
                                                 : ZetaMode::Ratio;
  }
  if (o.covariance_update) {
    h.covariance_update =
        *o.covariance_update == "literal" ? CovarianceUpdate::Literal : CovarianceUpdate::Centered;
  }
  bool hyper = h.gamma_prior.has_value();
  if (o.gamma_mode) hyper = *o.gamma_mode == "hyperprior";
  if (hyper) {
    GammaHyper g = h.gamma_prior.value_or(GammaHyper{});
    set(g.shape, o.gamma_shape);
    set(g.rate, o.gamma_rate);
    h.gamma_prior = g;
  } else {
    h.gamma_prior.reset();
  }
  c.validate();
  return c;
}

int run_fit(const fs::path& data_path, const fs::path& out_dir,
            const std::optional<fs::path>& config_path, const FitOverrides& o,
            std::ostream& out) {
  RunConfig cfg = config_path ? read_config(*config_path) : RunConfig{};
  cfg = apply_overrides(cfg, o);
  const Dataset data = read_dataset(data_path);
  cfg.hyperparams.validate(data.dim());
  ensure_dir(out_dir);
  write_manifest(out_dir / "manifest.json", cfg, "fit");

  std::vector<SamplerResult> results(cfg.chains);
  std::vector<std::exception_ptr> errors(cfg.chains);
  std::vector<std::thread> workers;
  for (int i = 0; i < cfg.chains; ++i) {
    workers.emplace_back([&, i] {
      try {
        SamplerConfig sc{cfg.hyperparams, chain_seed(cfg.seed, i), cfg.record_weights};
        results[i] = run_sampler(data, sc);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (int i = 0; i < cfg.chains; ++i) {
    const auto& r = results[i];
    write_trace(out_dir / fmt::format("trace_chain{}.ndjson", i), r.trace);
    RunSummary s;
    s.diagnostics = r.diagnostics;
    s.ma_histogram = ma_histogram(r.trace);
    const MaSummary ma = ma_summary(r.trace);
    s.ma_mean = ma.mean;
    s.ma_variance = ma.variance;
    s.n_samples = static_cast<int>(r.trace.samples.size());
    write_summary(out_dir / fmt::format("summary_chain{}.json", i), s);
    fmt::print(out, "chain {}: {} draws, mean M_a {:.4f}, birth {:.3f}, death {:.3f}\n", i,
               s.n_samples, ma.mean, r.diagnostics.birth.rate(), r.diagnostics.death.rate());
  }
  return 0;
}

int run_analyze(const std::vector<fs::path>& traces, const fs::path& out_dir, std::ostream& out) {
  PosteriorTrace merged;
  for (const auto& p : traces) {
    PosteriorTrace t = read_trace(p);
    if (!merged.samples.empty() && !t.samples.empty() && t.n_obs() != merged.n_obs()) {
      throw IoError(p.string() + ": trace covers a different number of observations");
    }
    for (auto& s : t.samples) merged.samples.push_back(std::move(s));
  }
  if (merged.samples.empty()) throw IoError("no samples in the given traces");
  ensure_dir(out_dir);

  const Eigen::MatrixXd psm = posterior_similarity(merged);
  write_matrix_csv(out_dir / "psm.csv", psm);

  const BinderResult b = binder_estimate(merged, psm);
  {
    std::ofstream f(out_dir / "binder.csv");
    if (!f) throw IoError("cannot open " + (out_dir / "binder.csv").string() + " for writing");
    f << "label\n";
    for (int l : b.labels) f << l + 1 << '\n';
    if (!f) throw IoError("write failed for " + (out_dir / "binder.csv").string());
  }

  const auto hist = ma_histogram(merged);
  {
    std::ofstream f(out_dir / "ma_histogram.csv");
    if (!f) throw IoError("cannot open " + (out_dir / "ma_histogram.csv").string() + " for writing");
    f << "m_a,probability\n";
    for (std::size_t k = 1; k < hist.size(); ++k) f << k << ',' << fmt::format("{}", hist[k]) << '\n';
    if (!f) throw IoError("write failed for " + (out_dir / "ma_histogram.csv").string());
  }
  const MaSummary ma = ma_summary(merged);
  fmt::print(out, "{} draws, mean M_a {:.4f}, variance {:.4f}, Binder clusters {}, loss {:.4f}\n",
             merged.samples.size(), ma.mean, ma.variance, count_allocated(b.labels), b.loss);
  return 0;
}

int run_prior_ma(double alpha0, const std::vector<double>& gammas, int m_min, int m_max, int n,
                 int reps, std::uint64_t seed, const std::optional<fs::path>& out_path,
                 std::ostream& out) {
  if (m_min < 2 || m_max < m_min) throw UsageError("need 2 <= m-min <= m-max");
  std::ofstream file;
  if (out_path) {
    file.open(*out_path);
    if (!file) throw IoError("cannot open " + out_path->string() + " for writing");
  }
  std::ostream& sink = out_path ? static_cast<std::ostream&>(file) : out;
  sink << "gamma,m,m_a,probability\n";
  Rng rng(seed);
  for (double g : gammas) {
    for (int m = m_min; m <= m_max; ++m) {
      const auto hist = prior_ma_simulation(alpha0, g, m, n, reps, rng);
      for (std::size_t k = 1; k < hist.size(); ++k) {
        fmt::print(sink, "{},{},{},{}\n", g, m, k, hist[k]);
      }
    }
  }
  if (out_path && !file) throw IoError("write failed for " + out_path->string());
  return 0;
}

int run_elicit(const fs::path& data_path, int k, const std::vector<double>& grid, int reps,
               std::uint64_t seed, std::ostream& out) {
  const Dataset data = read_dataset(data_path);
  Rng rng(seed);
  const ElicitationResult r = elicit_zeta(data, k, grid, reps, rng);
  fmt::print(out, "zeta {}\n", r.zeta);
  fmt::print(out, "data statistic {} (per dimension {})\n", r.data_statistic,
             fmt::join(r.per_dimension, ", "));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fmt::print(out, "  zeta {:<8} statistic {}\n", grid[i], r.grid_statistics[i]);
  }
  return 0;
}

struct DistArgs {
  std::optional<double> alpha, gamma, zeta, tau;
  std::optional<int> m, k;
  std::vector<double> point;
  bool sdir_mean = false, sdir_variance = false, sdir_log_const = false, sdir_log_density = false;
  bool sdir_moments = false, dispersion = false, ge_log_const = false, ge_log_density = false;
};

template <class T>
T need(const std::optional<T>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing ") + flag);
  return *v;
}

int run_dist(const DistArgs& a, std::ostream& out) {
  const int picked = a.sdir_mean + a.sdir_variance + a.sdir_log_const + a.sdir_log_density +
                     a.sdir_moments + a.dispersion + a.ge_log_const + a.ge_log_density;
  if (picked != 1) throw UsageError("choose exactly one quantity to evaluate");
  const int m = need(a.m, "--m");
  if (a.ge_log_const || a.ge_log_density) {
    const GeParams p{need(a.zeta, "--zeta"), m};
    p.validate();
    if (a.ge_log_const) {
      fmt::print(out, "{}\n", ge_log_norm_const(p));
    } else {
      fmt::print(out, "{}\n", ge_log_density(a.point, p));
    }
    return 0;
  }
  const SdirParams p{need(a.alpha, "--alpha"), need(a.gamma, "--gamma"), m};
  p.validate();
  if (a.sdir_mean) {
    fmt::print(out, "{}\n", sdir_moments(p, m).mean);
  } else if (a.sdir_variance) {
    fmt::print(out, "{}\n", sdir_moments(p, m).variance);
  } else if (a.sdir_log_const) {
    fmt::print(out, "{}\n", sdir_log_norm_const(p));
  } else if (a.sdir_log_density) {
    fmt::print(out, "{}\n", sdir_log_density(WeightVector(a.point), p));
  } else if (a.sdir_moments) {
    const int k = a.k.value_or(m);
    const SdirMoments mo = sdir_moments(p, k);
    fmt::print(out, "eta {}\nmean {}\nvariance {}\nsecond_moment {}\nleading_mean {}\n", mo.eta,
               mo.mean, mo.variance, mo.second_moment, mo.leading_mean);
    fmt::print(out, "marginal_moment_{} {}\nproduct_moment_{} {}\n", k, mo.marginal_k_moment, k,
               mo.product_moment_k);
  } else {
    fmt::print(out, "{}\n", internal_dispersion_expectation(p, need(a.tau, "--tau")));
  }
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{fmt::format("sipmix {}: repulsive Gaussian mixtures with SIP weights", kVersion),
               "sipmix"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::uint64_t sim_seed = 1;
  fs::path sim_out = "benchmark.csv";
  std::optional<fs::path> sim_labels;
  auto* sim = app.add_subcommand("simulate", "write the five-component bivariate benchmark");
  sim->add_option("--seed", sim_seed);
  sim->add_option("--out,-o", sim_out, "CSV destination");
  sim->add_option("--labels", sim_labels, "optional CSV of true labels");

  fs::path fit_data, fit_out = "fit";
  std::optional<fs::path> fit_config;
  FitOverrides fit_o;
  auto* fit = app.add_subcommand("fit", "run the sampler; writes traces, summaries and a manifest");
  fit->add_option("--data,-d", fit_data)->required()->check(CLI::ExistingFile);
  fit->add_option("--out,-o", fit_out, "output directory");
  fit->add_option("--config,-c", fit_config, "JSON config or manifest; flags override it")
      ->check(CLI::ExistingFile);
  add_fit_flags(fit, fit_o);

  std::vector<fs::path> an_traces;
  fs::path an_out = "analysis";
  auto* analyze = app.add_subcommand("analyze", "PSM, M_a histogram and Binder partition");
  analyze->add_option("--trace,-t", an_traces, "one or more chain traces")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--out,-o", an_out, "output directory");

  double pm_alpha0 = 1.0;
  std::vector<double> pm_gammas{0.0, 1.0, 3.0};
  int pm_m_min = 3, pm_m_max = 8, pm_n = 100, pm_reps = 10000;
  std::uint64_t pm_seed = 1;
  std::optional<fs::path> pm_out;
  auto* prior = app.add_subcommand("prior-ma", "implied prior on the number of allocated components");
  prior->add_option("--alpha0", pm_alpha0)->check(CLI::PositiveNumber);
  prior->add_option("--gammas", pm_gammas)->delimiter(',');
  prior->add_option("--m-min", pm_m_min);
  prior->add_option("--m-max", pm_m_max);
  prior->add_option("--n", pm_n)->check(CLI::PositiveNumber);
  prior->add_option("--reps", pm_reps)->check(CLI::PositiveNumber);
  prior->add_option("--seed", pm_seed);
  prior->add_option("--out,-o", pm_out);

  fs::path el_data;
  int el_k = 5, el_reps = 2000;
  std::vector<double> el_grid{0.01, 0.05, 0.1, 0.5, 1.0};
  std::uint64_t el_seed = 1;
  auto* elicit = app.add_subcommand("elicit-zeta", "match k-means centre gaps to GE draws");
  elicit->add_option("--data,-d", el_data)->required()->check(CLI::ExistingFile);
  elicit->add_option("--k", el_k);
  elicit->add_option("--grid", el_grid)->delimiter(',');
  elicit->add_option("--reps", el_reps)->check(CLI::PositiveNumber);
  elicit->add_option("--seed", el_seed);

  DistArgs da;
  auto* dist = app.add_subcommand("dist", "evaluate SDir and GE quantities");
  dist->add_option("--alpha", da.alpha);
  dist->add_option("--gamma", da.gamma);
  dist->add_option("--zeta", da.zeta);
  dist->add_option("--tau", da.tau);
  dist->add_option("--m", da.m);
  dist->add_option("--k", da.k, "coordinate for --sdir-moments (1-based)");
  dist->add_option("--point", da.point, "weights or locations, comma separated")->delimiter(',');
  dist->add_flag("--sdir-mean", da.sdir_mean, "mean of the last weight");
  dist->add_flag("--sdir-variance", da.sdir_variance, "variance of the last weight");
  dist->add_flag("--sdir-log-const", da.sdir_log_const);
  dist->add_flag("--sdir-log-density", da.sdir_log_density);
  dist->add_flag("--sdir-moments", da.sdir_moments);
  dist->add_flag("--dispersion", da.dispersion, "expected internal dispersion at --tau");
  dist->add_flag("--ge-log-const", da.ge_log_const);
  dist->add_flag("--ge-log-density", da.ge_log_density);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? e.what() : app.help()) << '\n';
      return 0;
    }
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  }

  try {
    if (*sim) {
      const LabelledDataset d = simulate_benchmark(sim_seed);
      write_dataset(sim_out, d.data);
      if (sim_labels) {
        std::ofstream f(*sim_labels);
        if (!f) throw IoError("cannot open " + sim_labels->string() + " for writing");
        f << "label\n";
        for (int l : d.labels) f << l + 1 << '\n';
      }
      fmt::print(out, "wrote {} observations to {}\n", d.data.n(), sim_out.string());
      return 0;
    }
    if (*fit) return run_fit(fit_data, fit_out, fit_config, fit_o, out);
    if (*analyze) return run_analyze(an_traces, an_out, out);
    if (*prior) {
      return run_prior_ma(pm_alpha0, pm_gammas, pm_m_min, pm_m_max, pm_n, pm_reps, pm_seed, pm_out,
                          out);
    }
    if (*elicit) return run_elicit(el_data, el_k, el_grid, el_reps, el_seed, out);
    return run_dist(da, out);
  } catch (const IoError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 1;
  }
}

}  // namespace sipmix
