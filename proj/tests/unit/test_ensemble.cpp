#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "sipmix/ensemble.hpp"
#include "sipmix/rng.hpp"
#include "test_support.hpp"

using namespace sipmix;
using namespace sipmix::testing;

namespace {

// ∫∫ over [-8, 8]², split along x = y where |x - y|^ζ has its kink.
double square_integral(const std::function<double(double, double)>& f) {
  auto outer = [&](double x) {
    auto g = [&](double y) { return f(x, y); };
    return integrate(g, -8.0, x, 1e-12) + integrate(g, x, 8.0, 1e-12);
  };
  return integrate(outer, -8.0, 8.0, 1e-12);
}

// Random-walk MH on GE(M, ζ), the oracle for the tridiagonal sampler.
std::vector<double> mh_min_coordinate(const GeParams& p, int n, int thin, Rng& rng) {
  std::vector<double> x(p.m);
  for (int i = 0; i < p.m; ++i) x[i] = i - 0.5 * (p.m - 1);
  double lp = ge_log_density(x, p);
  std::vector<double> out;
  const double step = 0.8 / std::sqrt(p.zeta);
  for (int it = 0; it < (n + 100) * thin; ++it) {
    for (int i = 0; i < p.m; ++i) {
      const double old = x[i];
      x[i] += step * rng.normal();
      const double lq = ge_log_density(x, p);
      if (std::log(rng.uniform()) < lq - lp) {
        lp = lq;
      } else {
        x[i] = old;
      }
    }
    if (it >= 100 * thin && it % thin == 0) out.push_back(*std::min_element(x.begin(), x.end()));
  }
  return out;
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("normalising constant closed forms") {
    for (double z : {0.5, 1.0, 3.0}) {
      CHECK(ge_log_norm_const({z, 1}) == doctest::Approx(0.5 * std::log(2 * std::numbers::pi / z)));
    }
    CHECK(std::exp(ge_log_norm_const({2.0, 2})) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    CHECK_THROWS_AS(ge_log_norm_const({0.0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(ge_log_norm_const({1.0, 0}), std::invalid_argument);
  }

  TEST_CASE("two-point constant by quadrature") {
    const double q = square_integral([](double x, double y) {
      return std::exp(-(x * x + y * y)) * (x - y) * (x - y);
    });
    CHECK(q == doctest::Approx(std::numbers::pi).epsilon(1e-8));
  }

  TEST_CASE("two-point density integrates to one") {
    for (double z : {0.5, 1.0, 2.0}) {
      const GeParams p{z, 2};
      const double q = square_integral([&](double x, double y) {
        const double pt[2] = {x, y};
        return std::exp(ge_log_density(pt, p));
      });
      CAPTURE(z);
      CHECK(q == doctest::Approx(1.0).epsilon(1e-4));
    }
  }

  TEST_CASE("three-point constant by importance sampling") {
    Rng r(17);
    const int n = 400000;
    std::vector<double> ratio(n);
    for (double& v : ratio) {
      const double a = r.normal(), b = r.normal(), c = r.normal();
      v = std::abs((a - b) * (a - c) * (b - c));
    }
    const auto m = mean_se(ratio);
    const double scale = std::pow(2 * std::numbers::pi, 1.5);
    const double g = std::exp(ge_log_norm_const({1.0, 3}));
    CHECK(std::abs(scale * m.mean - g) < 3 * scale * m.se);
  }

  TEST_CASE("density examples") {
    const double one[1] = {0.7};
    CHECK(ge_log_density(one, {2.0, 1}) ==
          doctest::Approx(-0.5 * std::log(2 * std::numbers::pi / 2.0) - 0.49));
    const double two[2] = {-1.0, 1.0};
    CHECK(ge_log_density(two, {2.0, 2}) == doctest::Approx(-2 + 2 * std::log(2.0) - std::log(std::numbers::pi)));
    const double tie[2] = {0.3, 0.3};
    CHECK(ge_log_density(tie, {2.0, 2}) == -std::numeric_limits<double>::infinity());
    CHECK_THROWS(ge_log_density(two, {2.0, 3}));
  }

  TEST_CASE("density is permutation invariant") {
    const GeParams p{1.3, 4};
    const double a[4] = {0.1, -1.2, 2.0, 0.7};
    const double b[4] = {2.0, 0.7, 0.1, -1.2};
    CHECK(std::abs(ge_log_density(a, p) - ge_log_density(b, p)) < 1e-12);
  }

  TEST_CASE("wider minimal gap raises the density at fixed norm") {
    const GeParams p{1.0, 3};
    // Both vectors have squared norm 2 and zero sum.
    const double close[3] = {-1.0, 1.0 - 1e-3, 1e-3};
    const double spread[3] = {-1.0, 0.0, 1.0};
    const double n1 = close[0] * close[0] + close[1] * close[1] + close[2] * close[2];
    const double scale = std::sqrt(2.0 / n1);
    const double close_scaled[3] = {close[0] * scale, close[1] * scale, close[2] * scale};
    CHECK(ge_log_density(spread, p) > ge_log_density(close_scaled, p));
  }

  TEST_CASE("single-point sampler has variance 1/zeta") {
    Rng r(3);
    const auto draws = sample_ge({4.0, 1}, 100000, r);
    std::vector<double> sq;
    for (const auto& x : draws) sq.push_back(x[0] * x[0]);
    const auto m = mean_se(sq);
    CHECK(std::abs(m.mean - 0.25) < 3 * m.se);
  }

  TEST_CASE("two-point sampler is centred") {
    Rng r(6);
    std::vector<double> s;
    for (const auto& x : sample_ge({2.0, 2}, 100000, r)) s.push_back(x[0] + x[1]);
    const auto m = mean_se(s);
    CHECK(std::abs(m.mean) < 3 * m.se);
  }

  TEST_CASE("tridiagonal sampler agrees with an MH oracle") {
    for (int m : {2, 3, 5}) {
      for (double z : {0.5, 1.0, 3.0}) {
        Rng r(100 + m), o(200 + m);
        const GeParams p{z, m};
        std::vector<double> exact;
        for (const auto& x : sample_ge(p, 3000, r)) exact.push_back(*std::min_element(x.begin(), x.end()));
        const auto mh = mh_min_coordinate(p, 3000, 25, o);
        CAPTURE(m);
        CAPTURE(z);
        CHECK(ks_statistic(exact, mh) < ks_critical_01(exact.size(), mh.size()));
      }
    }
  }
}
