#include "sipmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sipmix {

double Rng::uniform() {
  // 53 random bits, shifted half a step away from zero.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("gamma shape must be positive");
  }
  if (shape < 1.0) {
    // G(a) = G(a + 1) * U^(1/a)
    return log_gamma_variate(shape + 1.0) + std::log(uniform()) / shape;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

double Rng::gamma(double shape, double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("gamma rate must be positive");
  }
  return std::exp(log_gamma_variate(shape)) / rate;
}

double Rng::beta(double a, double b) {
  const double la = log_gamma_variate(a);
  const double lb = log_gamma_variate(b);
  const double hi = std::max(la, lb);
  return std::exp(la - hi) / (std::exp(la - hi) + std::exp(lb - hi));
}

std::vector<double> Rng::dirichlet(std::span<const double> alphas) {
  std::vector<double> out(alphas.size());
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out[i] = log_gamma_variate(alphas[i]);
    hi = std::max(hi, out[i]);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - hi);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

int Rng::categorical_log(std::span<const double> log_weights) {
  if (log_weights.empty()) {
    throw std::invalid_argument("categorical draw over an empty set");
  }
  const double hi = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(hi)) {
    throw std::domain_error("categorical draw with no finite weight");
  }
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - hi);
  double target = uniform() * total;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    target -= std::exp(log_weights[i] - hi);
    if (target <= 0.0) return static_cast<int>(i);
  }
  // Rounding left a sliver; return the last index with positive mass.
  for (std::size_t i = log_weights.size(); i-- > 0;) {
    if (std::isfinite(log_weights[i])) return static_cast<int>(i);
  }
  return static_cast<int>(log_weights.size()) - 1;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int needs n > 0");
  const int k = static_cast<int>(uniform() * n);
  return std::min(k, n - 1);
}

void Rng::shuffle(std::span<double> values) {
  // Fisher-Yates with our own integer draws.
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(static_cast<int>(i)));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace sipmix
