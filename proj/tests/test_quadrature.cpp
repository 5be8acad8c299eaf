#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "cae/quadrature.hpp"
#include "oracles.hpp"

using namespace cae;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::numbers::pi;

TEST_CASE("low-order Gauss-Legendre rules", "[quadrature]") {
  const auto one = gauss_legendre(1);
  REQUIRE(one.size() == 1);
  CHECK(one.nodes[0] == 0.0);
  CHECK_THAT(one.weights[0], WithinAbs(2.0, 1e-15));

  const auto two = gauss_legendre(2);
  CHECK_THAT(two.nodes[0], WithinAbs(-1.0 / std::sqrt(3.0), 1e-15));
  CHECK_THAT(two.nodes[1], WithinAbs(1.0 / std::sqrt(3.0), 1e-15));
  CHECK_THAT(two.weights[0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(two.weights[1], WithinAbs(1.0, 1e-15));

  CHECK_THAT(gauss_legendre(2, 0.0, 1.0).integrate([](double x) { return x * x; }), WithinAbs(1.0 / 3.0, 1e-15));
}

TEST_CASE("Gauss-Legendre rules are exact through degree 2n - 1", "[quadrature]") {
  for (int n = 1; n <= 64; ++n) {
    const auto rule = gauss_legendre(n, 0.0, 1.0);
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    CHECK_THAT(sum, WithinAbs(1.0, 1e-14));
    for (std::size_t i = 1; i < rule.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
    CHECK(rule.nodes.front() > 0.0);
    CHECK(rule.nodes.back() < 1.0);
    for (int k : {0, n, 2 * n - 1}) {
      const double got = rule.integrate([k](double x) { return std::pow(x, k); });
      CHECK_THAT(got, WithinRel(1.0 / (k + 1), 1e-13));
    }
  }
}

TEST_CASE("radial integration examples", "[quadrature]") {
  CHECK_THAT(integrate_radial([](double r) { return r * r; }, 0.0, 1.0, 8), WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(integrate_radial([](double) { return 1.0; }, 2.0, 5.0, 4), WithinAbs(3.0, 1e-14));
  CHECK_THAT(integrate_radial([](double r) { return 4.0 * r * r * std::exp(-2.0 * r); }, 0.0, 40.0, 32, 8),
             WithinAbs(1.0, 1e-13));
  CHECK_THROWS_AS(integrate_radial([](double r) { return std::sqrt(r - 0.5); }, 0.0, 1.0, 2), std::domain_error);
}

TEST_CASE("invalid quadrature requests", "[quadrature]") {
  CHECK_THROWS_AS(gauss_legendre(0), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(composite_gauss_legendre(4, 0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_hylleraas([](const HylleraasPoint&) { return 1.0; }, CavityRadius::free_space(), 8),
                  std::invalid_argument);
  CHECK_THROWS_AS(HylleraasIntegrator(CavityRadius(1.0), 1), std::invalid_argument);
}

TEST_CASE("configuration-space volume of two balls", "[quadrature]") {
  for (double r0 : {0.5, 1.0, 2.5}) {
    const double ball = 4.0 * pi * r0 * r0 * r0 / 3.0;
    const double got = integrate_hylleraas([](const HylleraasPoint&) { return 1.0; }, CavityRadius(r0), 24);
    CHECK_THAT(got, WithinRel(ball * ball, 1e-12));
  }
}

TEST_CASE("squared cutoff function integrates to a product of radial integrals", "[quadrature]") {
  for (double r0 : {0.5, 1.0, 3.0}) {
    const auto chi = cutoff_function(CavityRadius(r0));
    const double single = 4.0 * pi * std::pow(r0, 5) / 30.0;
    const double got = integrate_hylleraas(
        [&](const HylleraasPoint& p) {
          const double c = evaluate(chi, p);
          return c * c;
        },
        CavityRadius(r0), 24);
    CHECK_THAT(got, WithinRel(single * single, 1e-12));
  }
}

TEST_CASE("free-space normalization of exp(-s)", "[quadrature]") {
  // int e^{-2 r1} e^{-2 r2} d^3r1 d^3r2 = pi^2
  const double got = integrate_hylleraas([](const HylleraasPoint& p) { return std::exp(-2.0 * p.s); },
                                         CavityRadius::free_space(), 48, 40.0);
  CHECK_THAT(got, WithinRel(pi * pi, 1e-10));
}

TEST_CASE("half-range convention in t", "[quadrature]") {
  // Independent nested rule over the full t range [-s, s] with |t| <= u <= s,
  // prefactor pi^2. Odd integrands vanish there; even integrands reproduce the
  // half-range 2 pi^2 result of the library.
  const double r0 = 1.3;
  const auto rule = gauss_legendre(32, 0.0, 1.0);
  auto full_range = [&](auto&& f) {
    double total = 0.0;
    auto region = [&](double s, double w_s, double t_max) {
      // negative and positive t halves separately; |t| has a kink at 0
      for (double sign : {-1.0, 1.0})
        for (std::size_t j = 0; j < rule.size(); ++j) {
          const double t = sign * t_max * rule.nodes[j];
          const double wt = t_max * rule.weights[j];
          const double len = s - std::abs(t);
          for (std::size_t k = 0; k < rule.size(); ++k) {
            const double u = std::abs(t) + len * rule.nodes[k];
            total += w_s * wt * len * rule.weights[k] * f(HylleraasPoint{s, t, u}) * (s * s - t * t) * u;
          }
        }
    };
    for (std::size_t i = 0; i < rule.size(); ++i) {
      region(r0 * rule.nodes[i], r0 * rule.weights[i], r0 * rule.nodes[i]);
      const double s = r0 + r0 * rule.nodes[i];
      region(s, r0 * rule.weights[i], 2 * r0 - s);
    }
    return pi * pi * total;
  };
  auto even = [](const HylleraasPoint& p) { return std::exp(-p.s) * (1.0 + p.t * p.t + 0.3 * p.u); };
  auto odd = [](const HylleraasPoint& p) { return std::exp(-p.s) * p.t * (1.0 + p.u); };
  const double scale = full_range(even);
  CHECK(std::abs(full_range(odd)) <= 1e-13 * scale);
  CHECK_THAT(integrate_hylleraas(even, CavityRadius(r0), 32), WithinRel(scale, 1e-10));
}

TEST_CASE("order doubling reports convergence", "[quadrature]") {
  const auto res = integrate_hylleraas_converged(
      [](const HylleraasPoint& p) { return std::exp(-3.0 * p.s) * p.u; }, CavityRadius(2.0), 16);
  CHECK(res.converged);
  CHECK(res.order >= 32);
  CHECK_THAT(res.value,
             WithinRel(integrate_hylleraas([](const HylleraasPoint& p) { return std::exp(-3.0 * p.s) * p.u; },
                                           CavityRadius(2.0), 96),
                       1e-9));
}

TEST_CASE("term-sum integrator matches pointwise integration", "[quadrature]") {
  const TermSum f(1.4, {{1.0, {0, 0, 0}}, {0.3, {1, 0, 1}}, {-0.2, {0, 2, 0}}, {0.05, {2, 0, 2}}, {0.1, {0, 0, 3}}});
  for (double r0 : {0.6, 2.0, oracle::kInf}) {
    const auto radius = std::isinf(r0) ? CavityRadius::free_space() : CavityRadius(r0);
    const std::optional<double> s_max = radius.is_free() ? std::optional<double>(40.0) : std::nullopt;
    const HylleraasIntegrator integ(radius, 48);
    const double moments = integ.overlap(f, f, s_max);
    const double pointwise = integrate_hylleraas(
        [&](const HylleraasPoint& p) {
          const double v = evaluate(f, p);
          return v * v;
        },
        radius, 48, s_max);
    CHECK_THAT(moments, WithinRel(pointwise, 1e-12));
  }
}

TEST_CASE("norm integral agrees with six-dimensional Monte Carlo", "[quadrature]") {
  const double r0 = 2.0;
  const auto psi = build_trial(TrialKind::Psi1, std::vector<double>{1.5, 0.3}, CavityRadius(r0));
  const double exact = HylleraasIntegrator(CavityRadius(r0), 48).overlap(psi, psi);

  std::mt19937_64 rng(424242);
  const double ball = 4.0 * pi * r0 * r0 * r0 / 3.0;
  const auto mc = oracle::sample_mean(
      [&] {
        const auto x = oracle::to_hylleraas(oracle::in_ball(rng, r0), oracle::in_ball(rng, r0));
        const double v = evaluate(psi, x);
        return v * v;
      },
      1'000'000);
  const double estimate = ball * ball * mc.mean, sigma = ball * ball * mc.std_error;
  INFO("exact " << exact << " mc " << estimate << " +- " << sigma);
  CHECK(std::abs(estimate - exact) < 5.0 * sigma);
}
