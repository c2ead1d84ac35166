#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levy/density.hpp"
#include "levy/mc.hpp"

using namespace levy;
using std::numbers::pi;

namespace {

PathConfig config(long paths, std::uint64_t seed, double eps = 0.05, double dt = 1e-3) {
  PathConfig c;
  c.n_paths = paths;
  c.seed = seed;
  c.epsilon = eps;
  c.dt = dt;
  return c;
}

double variance(const std::vector<double>& v) {
  double m = 0, s = 0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

}  // namespace

TEST_CASE("chunk streams are distinct and reproducible") {
  auto a = chunk_rng(5, 0), b = chunk_rng(5, 1), c = chunk_rng(5, 0);
  auto x = a();
  CHECK(x != b());
  CHECK(x == c());
}

TEST_CASE("results do not depend on the worker count") {
  auto m = presets::polynomial(1, 1, 1);
  auto c = config(3 * kChunk + 17, 9);
  c.workers = 1;
  auto one = sample_increments(m, c, 1.0);
  c.workers = 3;
  auto three = sample_increments(m, c, 1.0);
  CHECK(one == three);
  c.seed = 10;
  CHECK(sample_increments(m, c, 1.0) != one);
}

TEST_CASE("pure Brownian increments") {
  const double a = 0.8, t = 0.5;
  auto v = sample_increments(presets::diffusion_dominated(1, a), config(100000, 1), t);
  // relative standard error of a sample variance is sqrt(2/n) ~ 0.45%
  CHECK(variance(v) == doctest::Approx(2 * a * t).epsilon(0.02));
}

TEST_CASE("big-jump sampler") {
  auto m = presets::polynomial(1, 1, 1);
  JumpSampler js(m, 0.05);
  CHECK(js.rate() == doctest::Approx(m.tail_mass(0.05)).epsilon(1e-9));
  auto rng = chunk_rng(1, 0);
  long beyond = 0;
  const long n = 200000;
  for (long i = 0; i < n; ++i) {
    double y;
    js.sample(rng, &y);
    CHECK_FALSE(std::abs(y) < 0.05);
    beyond += std::abs(y) > 1;
  }
  // P(|Y| > 1 | |Y| >= eps) = eps for g = r^-2
  CHECK(double(beyond) / n == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("exact stable sampler matches the Cauchy law") {
  auto c = config(1000000, 2);
  c.sampler = Sampler::exact_stable;
  auto v = sample_increments(presets::stable(1, 1.0), c, 1.0);
  std::sort(v.begin(), v.end());
  // the FFT density agrees with 1/(pi (1 + x^2)) to 1e-6, so the analytic CDF stands in for it
  double ks = 0;
  const double n = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    double F = 0.5 + std::atan(v[i]) / pi;
    ks = std::max({ks, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("compound Poisson approximation against the exact sampler") {
  auto m = presets::stable(1, 1.0);
  auto c = config(200000, 4, 0.1, 0.01);
  auto approx = sample_increments(m, c, 1.0);
  c.sampler = Sampler::exact_stable;
  auto exact = sample_increments(m, c, 1.0);
  const int bins = 20;
  auto hist = [&](const std::vector<double>& v) {
    std::vector<double> h(bins, 0.0);
    for (double x : v)
      if (x >= -5 && x < 5) h[static_cast<int>((x + 5) / 0.5)] += 1.0 / (v.size() * 0.5);
    return h;
  };
  auto ha = hist(approx), he = hist(exact);
  double gap = 0, top = 0;
  for (int i = 0; i < bins; ++i) {
    gap = std::max(gap, std::abs(ha[i] - he[i]));
    top = std::max(top, he[i]);
  }
  CHECK(gap <= 0.05 * top);
}

TEST_CASE("hitting from inside the ball is immediate") {
  CHECK(first_hitting(presets::stable(1, 1.0), config(1, 1), 0.5, 1.0) == 0.0);
  auto est = laplace_hitting(presets::stable(1, 1.0), config(100, 1), {0.5}, 1.0, {1.0});
  CHECK(est[0].value == 1.0);
}

TEST_CASE("Laplace transform of hitting times") {
  auto m = presets::stable(1, 1.0);
  auto c = config(4000, 5);
  c.horizon = 20;
  auto est = laplace_hitting(m, c, {8.0}, 1.0, {0.1, 1.0, 1000.0});
  CHECK(est[0].value > est[1].value);
  CHECK(est[1].value > est[2].value);
  CHECK(est[2].value < 1e-3);
}

TEST_CASE("recurrent Cauchy process eventually hits") {
  auto m = presets::stable(1, 1.0);
  auto c = config(2000, 6);
  c.auto_horizon = false;
  std::vector<double> frac;
  for (double h : {5.0, 20.0, 80.0, 320.0}) {
    c.horizon = h;
    frac.push_back(laplace_hitting(m, c, {4.0}, 1.0, {1.0})[0].hit_fraction);
  }
  // the miss probability decays only like 1 / log T in this borderline-recurrent case
  for (std::size_t i = 1; i < frac.size(); ++i) CHECK(frac[i] > frac[i - 1]);
  CHECK(frac.back() > 0.6);
}

TEST_CASE("mean exit time of Brownian motion") {
  const double a = 1.0, r = 1.0;
  auto e = exit_time_ball(presets::diffusion_dominated(1, a), config(20000, 7, 0.05, 1e-3), r);
  CHECK(std::abs(e.mean - r * r / (2 * a)) <= e.ci_halfwidth + 0.01);
  CHECK(e.survival > 0);
  CHECK(e.survival < 1);
}

TEST_CASE("mean exit time of the Cauchy process under step refinement") {
  auto m = presets::stable(1, 1.0);
  auto coarse = exit_time_ball(m, config(20000, 8, 0.05, 5e-3), 1.0);
  auto fine = exit_time_ball(m, config(20000, 8, 0.05, 5e-4), 1.0);
  CHECK(coarse.mean == doctest::Approx(fine.mean).epsilon(0.02 + (coarse.ci_halfwidth + fine.ci_halfwidth) / fine.mean));
  // E^0 tau_{B(0,1)} = 1 for the Cauchy process
  CHECK(std::abs(fine.mean - 1.0) <= 3 * fine.ci_halfwidth + 0.02);
}

TEST_CASE("Feynman-Kac expectations") {
  auto m = presets::stable(1, 1.0);
  auto c = config(2000, 9);
  auto one = fk_expectation(m, c, [](double) { return 0.0; }, [](double) { return 1.0; }, 0.3, 1.0);
  CHECK(one.value == 1.0);
  CHECK(one.ci_halfwidth == 0.0);
  auto pos = fk_expectation(
      m, c, [](double x) { return x * x; }, [](double x) { return 2 + std::sin(x); }, 0.0, 1.0);
  CHECK(pos.value <= 3.0);
  CHECK(pos.value > 0);
}

TEST_CASE("flattened intensity and the domination sandwich") {
  auto m = presets::polynomial(1, 1, 1);
  auto flat = modified_model(m, 4);
  CHECK(sigma_mass(m, 4).total > 0);
  CHECK(flat.flattening().has_value());
  CHECK_THROWS(sigma_mass(flat, 4));
  auto rep = domination_check(m, 4, {1.0}, 40, 1e-8);
  CHECK(rep.pass);
  CHECK(rep.kernel_pass);
  for (const auto& row : rep.rows) {
    CHECK(row.lower_margin >= -1e-8);
    CHECK(row.upper_margin >= -1e-8);
  }
}

TEST_CASE("resolvent kernel") {
  auto m = presets::stable(1, 1.0);
  auto g = potential_kernel(m, 1.0, {1.0, 2.0, 4.0});
  CHECK(g[0] > g[1]);
  CHECK(g[1] > g[2]);
  CHECK(g[2] > 0);
}

TEST_CASE("exit position probe against the killed propagator") {
  auto rep = ikeda_watanabe_probe(presets::stable(1, 1.0), config(40000, 12, 0.05, 1e-3), 0.0, 1.0, 3, 4);
  CHECK(rep.quadrature > 0);
  CHECK(rep.rel_diff < 0.1);
  CHECK(rep.pass);
}
