#include <doctest.h>

#include <cmath>

#include "levy/decay.hpp"
#include "levy/errors.hpp"
#include "levy/mc.hpp"
#include "levy/spectral.hpp"

using namespace levy;

namespace {

std::vector<double> grid_x(double L, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = -L + 2 * L * i / n;
  return x;
}

template <class F>
std::vector<double> sample(const std::vector<double>& x, F f) {
  std::vector<double> v;
  for (double t : x) v.push_back(f(std::abs(t)));
  return v;
}

}  // namespace

TEST_CASE("window slice keeps the positive side in order") {
  auto x = grid_x(10, 40);
  auto phi = sample(x, [](double r) { return r; });
  std::vector<double> xs, ps;
  window_slice(x, phi, {2, 4}, xs, ps);
  REQUIRE_FALSE(xs.empty());
  CHECK(xs.front() >= 2);
  CHECK(xs.back() <= 4);
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] > xs[i - 1]);
}

TEST_CASE("ratio of nu to itself") {
  auto m = presets::polynomial(1, 1, 1);
  auto x = grid_x(100, 4000);
  auto nu = sample(x, [&](double r) { return r > 0 ? m.nu_radial(r) : 1.0; });
  auto s = tail_ratio(x, nu, m, {15, 40});
  CHECK(s.min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.comparable);
  CHECK(s.nodes > 0);
}

TEST_CASE("window validation") {
  auto m = presets::polynomial(1, 1, 1);
  auto x = grid_x(100, 4000);
  auto nu = sample(x, [&](double r) { return r > 0 ? m.nu_radial(r) : 1.0; });
  CHECK_THROWS_AS(tail_ratio(x, nu, m, {5, 40}, 25, 100), ConfigError);
  CHECK_THROWS_AS(tail_ratio(x, nu, m, {15, 60}, 25, 100), ConfigError);
  CHECK_NOTHROW(tail_ratio(x, nu, m, {15, 40}, 25, 100));
  CHECK_THROWS_AS(tail_ratio(x, nu, m, {40.01, 40.02}), ConfigError);
}

TEST_CASE("fits recover exact synthetic decay") {
  auto x = grid_x(100, 20000);
  FitSpec power;
  auto p = fit_decay(x, sample(x, [](double r) { return r > 0 ? 3 * std::pow(r, -2) : 1.0; }), {5, 50}, power);
  CHECK(p.power == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(p.amplitude == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  CHECK(p.r2 > 0.999999);

  FitSpec ex;
  ex.family = FitFamily::exp;
  auto e = fit_decay(x, sample(x, [](double r) { return r > 0 ? std::exp(-r) / r : 1.0; }), {5, 30}, ex);
  CHECK(e.rate == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(e.power == doctest::Approx(1.0).epsilon(1e-4));

  FitSpec st;
  st.family = FitFamily::stretched_exp;
  auto s = fit_decay(x, sample(x, [](double r) { return r > 0 ? std::exp(-2 * std::sqrt(r)) * std::pow(r, -0.3) : 1.0; }),
                     {4, 60}, st);
  CHECK(s.rate == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(s.beta == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(s.power == doctest::Approx(0.3).epsilon(1e-3));

  st.beta = 0.5;
  st.delta = 0.0;
  auto fixed = fit_decay(x, sample(x, [](double r) { return r > 0 ? std::exp(-2 * std::sqrt(r)) : 1.0; }), {4, 60}, st);
  CHECK(fixed.beta == 0.5);
  CHECK(fixed.power == 0.0);
  CHECK(fixed.rate == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("regime labels") {
  auto poly = presets::polynomial(1, 1, 1);
  RegimeInput in;
  in.lambda0 = -0.5;
  in.fit.family = FitFamily::power;
  in.fit.power = 2.02;
  in.fit.r2 = 0.999;
  CHECK(classify_regime(poly, in).regime == Regime::nu_driven);
  in.fit.power = 3.0;
  CHECK(classify_regime(poly, in).regime == Regime::not_nu_driven);
  in.fit.r2 = 0.9;
  CHECK(classify_regime(poly, in).regime == Regime::inconclusive);

  auto ex = presets::exponential(1, 1, 1, 2);
  RegimeInput e;
  e.fit.family = FitFamily::exp;
  e.fit.rate = 1.02;
  e.fit.r2 = 0.999;
  CHECK(classify_regime(ex, e).regime == Regime::nu_driven);

  auto sup = presets::superexponential(1, 1, 1, 2, 0);
  RegimeInput s;
  s.fit.family = FitFamily::exp;
  s.fit.r2 = 0.999;
  RatioStats grow;
  grow.log_first = 0;
  grow.log_last = 10;
  s.ratio = grow;
  CHECK(classify_regime(sup, s).regime == Regime::slower_than_nu);
}

TEST_CASE("shell constant of an exponential intensity") {
  // g(r)/g(r+1) = e ((r+1)/r)^2 is largest at r = 1
  CHECK(measure_c6(presets::exponential(1, 1, 1, 2), 20) == doctest::Approx(4 * std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("lower bound certificate for a stable ground state") {
  auto m = presets::stable(1, 1.0);
  Potential v(pot::Well{2, 1});
  Grid1D g(128, 1 << 13);
  auto gs = ground_state(Hamiltonian(m, v, g));
  PathConfig cfg;
  cfg.n_paths = 20000;
  cfg.epsilon = 0.05;
  cfg.seed = 3;
  auto exit = exit_time_ball(m, cfg, 1.0, 1.0);
  REQUIRE(exit.survival > 0);
  auto c = lower_bound_certificate(m, v, g.nodes(), gs.vectors[0], gs.eigenvalues[0], 0.1, exit.survival, {3, 40});
  CHECK(c.K > 0);
  CHECK(c.pass);
  CHECK(c.worst_margin >= 1);
  auto c2 = lower_bound_certificate(m, v, g.nodes(), gs.vectors[0], gs.eigenvalues[0], 0.05, exit.survival, {3, 40});
  CHECK(c2.pass);
  CHECK(c2.K == doctest::Approx(c.K).epsilon(0.1));
}

TEST_CASE("hitting overlay") {
  auto m = presets::polynomial(1, 1, 1);
  auto one = hitting_overlay({{8, 0.01, 0.001}}, m);
  CHECK(one.stability == "n/a");
  CHECK(one.c_hat > 0);
  std::vector<HittingPoint> pts;
  for (double x : {8.0, 16.0, 32.0}) pts.push_back({x, 0.7 * m.nu_radial(x), 0});
  auto r = hitting_overlay(pts, m);
  CHECK(r.spread == doctest::Approx(1.0));
  CHECK(r.stability == "stable");
  pts[2].value *= 5;
  CHECK(hitting_overlay(pts, m).stability == "unstable");
}

TEST_CASE("decay report on an exact power law") {
  auto m = presets::polynomial(1, 1, 1);
  auto x = grid_x(100, 8000);
  auto phi = sample(x, [&](double r) { return r > 0 ? 0.3 * m.nu_radial(r) : 1.0; });
  auto rep = analyze_decay(m, x, phi, {15, 40}, FitSpec{}, -0.4, 0, 100);
  CHECK(rep.ratio.comparable);
  CHECK(rep.fit.power == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.regime.regime == Regime::nu_driven);
}
