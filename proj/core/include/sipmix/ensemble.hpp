#pragma once

#include <span>
#include <vector>

namespace sipmix {

class Rng;

/// Gaussian ensemble GE(M, ζ): density ∝ exp(-ζ Σx²/2) |Δx|^ζ on R^M.
struct GeParams {
  double zeta = 1.0;
  int m = 1;

  void validate() const;
};

/// One dimension's component locations μ_{1:M,d}.
using LocationVector = std::vector<double>;

/// log 𝒢(M, ζ).
double ge_log_norm_const(const GeParams& p);

/// Normalised log-density; -inf when two entries coincide.
double ge_log_density(std::span<const double> x, const GeParams& p);

/// Exact draws from the tridiagonal β-Hermite model with β = ζ, eigenvalues
/// rescaled by 1/√ζ and returned in uniformly random order.
std::vector<LocationVector> sample_ge(const GeParams& p, int n, Rng& rng);

namespace detail {
/// log 𝒢(M, ζ) without validation; defined for M >= 0 (𝒢(0, ζ) = 1).
double ge_log_norm_const_raw(double zeta, int m);
}  // namespace detail

}  // namespace sipmix
