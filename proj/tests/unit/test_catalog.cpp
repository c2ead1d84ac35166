#include <doctest.h>

#include <cmath>
#include <numbers>

#include "levy/errors.hpp"
#include "levy/model.hpp"
#include "levy/quadrature.hpp"

using namespace levy;
using std::numbers::pi;

namespace {

std::vector<LevyModel> catalog() {
  return {presets::stable(1, 1.0),
          presets::stable(1, 1.5),
          presets::polynomial(1, 1, 1),
          presets::polynomial(1, 0.5, 2),
          presets::subexponential(1, 1, 1, 0.5, 0),
          presets::exponential(1, 1, 1, 2),
          presets::superexponential(1, 1, 1, 2, 0),
          presets::relativistic(1, 1.0)};
}

// Composite trapezoid on a uniform grid; independent of the adaptive rules.
template <class F>
double trapezoid(F f, double a, double b, long n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

}  // namespace

TEST_CASE("quadrature on known integrals") {
  CHECK(integrate([](double x) { return std::sin(x); }, 0, pi).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(integrate_tail([](double r) { return 1 / (r * r); }, 1).value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_tail([](double r) { return std::exp(-r); }, 2).value == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  for (double k : {0.5, 1.0, 3.0}) {
    auto c = fourier_cos_tail([](double r) { return std::exp(-r); }, 0, k);
    CHECK(c.value == doctest::Approx(1 / (1 + k * k)).epsilon(1e-9));
    auto s = fourier_sin_tail([](double r) { return std::exp(-r); }, 0, k);
    CHECK(s.value == doctest::Approx(k / (1 + k * k)).epsilon(1e-9));
  }
}

TEST_CASE("quadrature failure is reported") {
  QuadOptions o;
  o.max_intervals = 3;
  auto f = [](double x) { return std::sin(1 / x); };
  CHECK_THROWS_AS(integrate(f, 1e-6, 1, o), QuadratureError);
  o.throw_on_failure = false;
  CHECK_FALSE(integrate(f, 1e-6, 1, o).converged);
}

TEST_CASE("profile formulas") {
  CHECK(Profile(Polynomial{1, 1}, 1).g(2) == doctest::Approx(0.25));
  CHECK(Profile(Exponential{1, 1, 1}, 1).g(1) == doctest::Approx(std::exp(-1.0)));
  Profile sub(SubExponential{1, 1, 0.5, 0}, 1);
  CHECK(sub.g(9) == doctest::Approx(std::exp(-3.0)));
  // small branch is a pure power matched at r = 1
  CHECK(sub.g(0.5) == doctest::Approx(std::exp(-1.0) * std::pow(0.5, -2)));
  CHECK_THROWS_AS(Profile(Polynomial{1, 1}, 1).g(0), DomainError);
}

TEST_CASE("profiles are positive and non-increasing") {
  for (const auto& m : catalog()) {
    double prev = INFINITY;
    for (int i = 0; i <= 400; ++i) {
      double r = std::pow(10.0, -3 + 5.0 * i / 400);
      // log g: the super-exponential tail underflows g itself
      double g = m.profile().log_g(r);
      CHECK(std::isfinite(g));
      CHECK(g <= prev + 1e-12);
      prev = g;
    }
  }
}

TEST_CASE("user table validation") {
  CHECK_THROWS_AS(Profile(UserTable{{0.5, 1, 2, 4}, {4, 1, 2, 0.01}}, 1), ConfigError);
  CHECK_THROWS_AS(Profile(UserTable{{1, 0.5, 2}, {1, 0.5, 0.1}}, 1), ConfigError);
  Profile ok(UserTable{{0.5, 1, 2, 4}, {4, 1, 0.25, 0.0625}}, 1);
  CHECK(ok.g(2) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(ok.power_tail());
  CHECK(ok.tail_exponent() == doctest::Approx(2.0));
}

TEST_CASE("intensity at the origin") {
  auto m = presets::polynomial(1, 1, 1);
  CHECK_THROWS_AS(m.nu_radial(0), DomainError);
  CHECK(m.nu({2.0}) == doctest::Approx(m.nu({-2.0})));
}

TEST_CASE("symbol basics") {
  for (const auto& m : catalog()) CHECK(m.psi(0.0) == 0.0);
  auto rel = presets::relativistic(1, 1.0);
  for (double k : {0.1, 1.0, 5.0}) CHECK(rel.psi_closed(k) == doctest::Approx(std::sqrt(k * k + 1) - 1).epsilon(1e-12));
}

TEST_CASE("closed form and quadrature symbols agree") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    auto m = presets::stable(1, alpha);
    for (double k : {0.3, 1.0, 4.0}) {
      CHECK(m.psi_quadrature(k) == doctest::Approx(std::pow(k, alpha)).epsilon(1e-7));
    }
  }
  auto rel = presets::relativistic(1, 1.0);
  for (double k : {0.5, 2.0}) CHECK(rel.psi_quadrature(k) == doctest::Approx(rel.psi_closed(k)).epsilon(1e-5));
}

TEST_CASE("subexponential symbol against a trapezoid oracle") {
  auto m = presets::subexponential(1, 1, 1, 0.5, 0);
  const double adaptive = m.psi(1.0);
  // 2 \int (1 - cos r) nu(r) dr with 1 - cos r = 2 sin^2(r/2) to avoid cancellation near 0
  auto f = [&](double r) {
    double s = std::sin(r / 2);
    return 4 * s * s * m.nu_radial(r);
  };
  const double oracle = trapezoid(f, 1e-8, 1e3, 10'000'000);
  CHECK(adaptive == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("tail mass") {
  CHECK(presets::polynomial(1, 1, 1).tail_mass(1) == doctest::Approx(2.0).epsilon(1e-10));
  // 2 \int_4^inf e^{-sqrt r} dr = 4 Gamma(2, 2) = 12 e^{-2}
  CHECK(presets::subexponential(1, 1, 1, 0.5, 0).tail_mass(4) == doctest::Approx(12 * std::exp(-2.0)).epsilon(1e-9));
  for (const auto& m : catalog()) CHECK(m.tail_mass(2) < m.tail_mass(1));
}

TEST_CASE("sup of the symbol over balls") {
  auto st = presets::stable(1, 1.5);
  for (double r : {0.5, 1.0, 3.0}) CHECK(st.big_psi(r) == doctest::Approx(std::pow(r, 1.5)).epsilon(1e-8));
  auto poly = presets::polynomial(1, 0.5, 2);
  double worst = 0;
  for (double r : {0.25, 0.5, 1.0}) {
    CHECK(poly.big_psi(r) >= poly.big_psi(r / 2));
    worst = std::max(worst, poly.big_psi(2 * r) / poly.big_psi(r));
  }
  CHECK(worst <= 4.0);
}

TEST_CASE("Pruitt function") {
  // H(r) = 2 (\int_0^r y^2/r^2 y^-2 dy + \int_r^inf y^-2 dy) = 4/r
  auto poly = presets::polynomial(1, 1, 1);
  CHECK(poly.pruitt_H(1) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(poly.pruitt_H(2) == doctest::Approx(2.0).epsilon(1e-9));
  for (const auto& m : catalog()) {
    for (double r : {0.5, 1.0, 2.0}) CHECK(m.pruitt_H(r) <= 4 * m.pruitt_H(2 * r) * (1 + 1e-12));
  }
  auto diff = presets::diffusion_dominated(1, 1.0);
  CHECK(diff.pruitt_H(1e-2) * 1e-4 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Pruitt comparability band") {
  auto m = presets::stable(1, 1.0);
  auto b = pruitt_comparability(m, 0.1, 10);
  CHECK(b.c1 <= b.c2);
  CHECK(b.c1 > 0);
  auto one = pruitt_comparability(m, 2, 2);
  CHECK(one.c1 == one.c2);
}
