#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace sipmix {

/// Random stream used by every sampler in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All derived variates (uniform, normal, gamma, ...) are produced
/// by code in this class rather than by <random> distributions, whose
/// algorithms are implementation-defined. A given seed therefore yields the
/// same draws on every conforming platform.
class Rng {
 public:
  /// Identifier recorded in run manifests. Bump the suffix whenever any
  /// variate algorithm below changes.
  static constexpr std::string_view kAlgorithm = "mt19937_64/sipmix-variates-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double exponential() { return -std::log(uniform()); }

  /// log of a Gamma(shape, 1) draw; accurate for very small shapes.
  double log_gamma_variate(double shape);
  double gamma(double shape, double rate = 1.0);
  double beta(double a, double b);
  double chi_square(double dof) { return gamma(0.5 * dof, 0.5); }

  /// Dirichlet draw computed in log space so that tiny concentrations do
  /// not underflow to exact zeros.
  std::vector<double> dirichlet(std::span<const double> alphas);

  /// Index drawn with probability proportional to exp(log_weights).
  int categorical_log(std::span<const double> log_weights);
  /// Uniform integer in [0, n).
  int uniform_int(int n);

  void shuffle(std::span<double> values);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sipmix
