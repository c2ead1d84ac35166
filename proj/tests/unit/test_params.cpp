#include <doctest.h>

#include <cmath>

#include "levy/density.hpp"
#include "levy/params.hpp"

using namespace levy;

namespace {

// sup over lattice x of a midpoint double sum; cells are aligned with the cut points |y| = 1, |x - y| = 1
double k1_brute_force_cauchy_like() {
  const double h = 0.2, A = 1000;
  const long cells = static_cast<long>(2 * A / h);
  double best = 0;
  for (long j = 0; j < cells; ++j) {
    const double x = -A + j * h;
    if (std::abs(x) < 1 - 1e-9) continue;
    double sum = 0;
    for (long k = 0; k < cells; ++k) {
      const double y = -A + (k + 0.5) * h;
      if (std::abs(y) <= 1 || std::abs(x - y) <= 1) continue;
      sum += x * x / ((x - y) * (x - y) * y * y);
    }
    best = std::max(best, sum * h);
  }
  return best;
}

K3Constants cauchy_constants() {
  K3Constants k;
  k.c9 = 1.0;
  k.c10 = 2.0;
  k.c4 = 1.0;
  return k;
}

}  // namespace

TEST_CASE("K1 of the Cauchy-like intensity against a brute-force double sum") {
  auto m = presets::polynomial(1, 1, 1);
  auto r = k1(m, 1);
  CHECK(r.stabilized);
  CHECK(r.value == doctest::Approx(k1_brute_force_cauchy_like()).epsilon(0.02));
}

TEST_CASE("K1 is non-increasing and dominates the tail mass") {
  for (const auto& m : {presets::polynomial(1, 1, 1), presets::subexponential(1, 1, 1, 0.5, 0)}) {
    double prev = INFINITY;
    for (double s : {1.0, 2.0, 4.0}) {
      auto r = k1(m, s);
      CHECK(r.value <= prev * 1.01);
      CHECK(r.value >= m.tail_mass(s) / (2 * std::pow(m.c5(), 4)));
      prev = r.value;
    }
  }
}

TEST_CASE("K2 of a pure power law") {
  // sup_{|x| >= 2s} (|x| / (|x| - s))^2 over a grid; attained at |x| = 2s
  double grid = 1;
  for (int i = 0; i <= 100000; ++i) {
    double x = 2 + 1e-3 * i;
    grid = std::max(grid, std::pow(x / (x - 1), 2));
  }
  auto m = presets::polynomial(1, 1, 1);
  CHECK(k2(m, 1, 2, INFINITY) == doctest::Approx(grid).epsilon(1e-6));
  CHECK(grid == doctest::Approx(4.0));
  for (double s : {0.5, 1.0, 3.0}) CHECK(k2(presets::subexponential(1, 1, 1, 0.5, 0), s, 2 * s, INFINITY) >= 1);
}

TEST_CASE("K2 grows exponentially for an exponential intensity") {
  auto m = presets::exponential(1, 1, 1, 2);
  double first = 0;
  for (double s : {1.0, 2.0, 4.0}) {
    double v = k2(m, s, 2 * s + 2, INFINITY);
    CHECK(v >= std::exp(s));
    if (first == 0) first = v / std::exp(s);
    CHECK(v / std::exp(s) >= 0.5 * first);
  }
}

TEST_CASE("C3 bound") {
  auto st = presets::stable(1, 1.0);
  auto coarse = c3_bound(st, 1, 161), fine = c3_bound(st, 1, 1601);
  CHECK(coarse.value == doctest::Approx(fine.value).epsilon(0.05));
  CHECK(c3_bound(st, 2).value <= c3_bound(st, 1).value * psi_doubling(st, 0.25, 2));

  // pure diffusion: a sup|f_s''| = a s^-2 sup|f''|
  auto diff = presets::diffusion_dominated(1, 1.0);
  double f, f1, f2, peak = 0;
  for (int i = 0; i <= 20000; ++i) {
    bump(0.5 + 0.5 * i / 20000, f, f1, f2);
    peak = std::max(peak, std::abs(f2));
  }
  for (double s : {1.0, 2.0}) CHECK(c3_bound(diff, s, 1601).value == doctest::Approx(peak / (s * s)).epsilon(0.01));
}

TEST_CASE("bump profile is C2") {
  double f, f1, f2;
  bump(0.5, f, f1, f2);
  CHECK(f == 1);
  bump(0.5 + 1e-9, f, f1, f2);
  CHECK(std::abs(f2) < 1e-6);
  bump(1 - 1e-9, f, f1, f2);
  CHECK(std::abs(f) < 1e-12);
  CHECK(std::abs(f1) < 1e-6);
  CHECK(std::abs(f2) < 1e-6);
}

TEST_CASE("Green function bound") {
  auto m = presets::stable(1, 1.0);
  auto k = cauchy_constants();
  auto b = k3_upper(m, 4, k);
  CHECK(b.terms[1] == 0.0);
  CHECK(b.value == doctest::Approx(b.terms[0] + b.terms[2]));

  auto m3 = presets::stable(3, 1.0);
  std::vector<double> diag;
  for (double s : {1.0, 2.0, 4.0, 8.0, 16.0}) diag.push_back(k3_upper(m3, s, k).green_diagnostic);
  for (double v : diag) CHECK(v <= 2 * diag.front());

  // occupation-density estimate of the Green function on B(0, 8)
  PathConfig cfg;
  cfg.n_paths = 4000;
  cfg.epsilon = 0.1;
  cfg.dt = 1e-2;
  cfg.seed = 17;
  auto mc = green_sup_mc(m, cfg, 8, 1, 5, 0.25);
  CHECK(mc.sup <= k3_upper(m, 8, k).value + mc.ci_halfwidth);
}

TEST_CASE("h functions and eta0") {
  for (const auto& m : {presets::polynomial(1, 1, 1), presets::subexponential(1, 1, 1, 0.5, 0),
                        presets::exponential(1, 1, 1, 2)}) {
    auto exit = ExitTimeSource::analytic(m, 1.0);
    auto k3 = K3Source::bound(m, cauchy_constants());
    CHECK(h1(m, 1, 2, exit, k3) > 0);
    CHECK(h2(m, 1, exit, k3) > 0);
  }
  auto poly = presets::polynomial(1, 1, 1);
  auto exit = ExitTimeSource::analytic(poly, 1.0);
  auto k3 = K3Source::bound(poly, cauchy_constants());
  double prev = INFINITY;
  for (double s : {8.0, 16.0, 32.0}) {
    double v = s * h2(poly, s, exit, k3);
    CHECK(v < prev);
    prev = v;
  }
  auto e = eta0(poly, exit, k3);
  CHECK(e.value > 0);
  CHECK(std::isfinite(e.value));
  CHECK(e.conservative >= e.value);
}

TEST_CASE("cond1 with a non-positive eta fails") {
  auto poly = presets::polynomial(1, 1, 1);
  auto exit = ExitTimeSource::analytic(poly, 1.0);
  auto k3 = K3Source::bound(poly, cauchy_constants());
  auto r = cond1_check(poly, 8, 16, 32, 0.0, exit, k3);
  CHECK(r.verdict == Verdict::fail);
  CHECK(r.lhs > 0);
}

TEST_CASE("jump-paring audit") {
  CHECK(jump_paring_audit(presets::polynomial(1, 1, 1)).verdict == Verdict::pass);
  CHECK(std::isfinite(jump_paring_audit(presets::polynomial(1, 1, 1)).c7));
  CHECK(jump_paring_audit(presets::exponential(1, 1, 1, 1.6)).verdict == Verdict::pass);
  CHECK(jump_paring_audit(presets::exponential(1, 1, 1, 0)).verdict == Verdict::fail);
}

TEST_CASE("smallness conditions") {
  auto poly = smallness_checks(presets::polynomial(1, 1, 1), 2, {2, 4, 8, 16}, {1, 2, 4, 8});
  CHECK(poly.killing == Verdict::pass);
  CHECK(poly.bounded == Verdict::pass);
  auto sub = smallness_checks(presets::subexponential(1, 1, 1, 0.5, 0), 4, {2, 4, 8, 16}, {1, 2, 4, 8});
  CHECK(sub.killing == Verdict::pass);
  for (std::size_t i = 1; i < sub.product.size(); ++i) CHECK(sub.product[i] < sub.product[i - 1]);
  auto ex = smallness_checks(presets::exponential(1, 1, 1, 2), 2, {2, 4, 8}, {1, 2, 4, 8});
  CHECK(ex.bounded == Verdict::fail);
}

TEST_CASE("two big jumps of a polynomial intensity") {
  auto p = subexponentiality_probe(presets::polynomial(1, 1, 1), {50}, 4000000, 3);
  REQUIRE(p.points.size() == 1);
  CHECK(std::abs(p.points[0].ratio - 2) <= 3 * p.points[0].ci_halfwidth + 0.05);
}

TEST_CASE("symbol doubling of a stable law") {
  CHECK(psi_doubling(presets::stable(1, 1.5), 0.1, 10) == doctest::Approx(std::pow(2, 1.5)).epsilon(1e-8));
}
