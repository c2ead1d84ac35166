#include <doctest.h>

#include <cmath>
#include <numbers>

#include "levy/density.hpp"

using namespace levy;
using std::numbers::pi;

TEST_CASE("Cauchy density") {
  auto m = presets::stable(1, 1.0);
  auto x = linspace(-20, 20, 401);
  // periodic images add about pi / (3 P^2); a wide period keeps them below the tolerance
  DensityOptions o;
  o.min_period = 4096;
  auto p = transition_density(m, 1.0, x, o);
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(p.values[i] - 1 / (pi * (1 + x[i] * x[i]))));
  CHECK(worst < 1e-6);
  CHECK(p.violations == 0);
  CHECK(density_at_origin(m, 1.0) == doctest::Approx(1 / pi).epsilon(1e-9));
  CHECK(density_at_origin(m, 2.0) == doctest::Approx(1 / (2 * pi)).epsilon(1e-9));
}

TEST_CASE("pure diffusion density") {
  const double a = 1.0, t = 0.5;
  auto m = presets::diffusion_dominated(1, a);
  auto x = linspace(-6, 6, 241);
  auto p = transition_density(m, t, x);
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double exact = std::exp(-x[i] * x[i] / (4 * a * t)) / std::sqrt(4 * pi * a * t);
    worst = std::max(worst, std::abs(p.values[i] - exact));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("exponential model mass on a finite box") {
  auto m = presets::exponential(1, 1, 1, 2);
  auto p = transition_density(m, 5.0, linspace(-60, 60, 2401));
  CHECK(p.mass > 1 - 1e-4);
  CHECK(p.mass < 1 + 1e-6);
}

TEST_CASE("cutoff frequency") {
  CHECK(cutoff_frequency(presets::stable(1, 1.0), 1.0, 40) == doctest::Approx(40).epsilon(1e-6));
  CHECK(cutoff_frequency(presets::stable(1, 1.0), 2.0, 40) == doctest::Approx(20).epsilon(1e-6));
}

TEST_CASE("density regularity constants") {
  auto st = density_regularity_checks(presets::stable(1, 1.0), {0.1, 1, 10}, {1, 2, 4, 8});
  CHECK(std::isfinite(st.c9));
  CHECK(st.c9 > 0);
  CHECK_FALSE(st.c9_growth);
  CHECK(st.c9_table.size() == 3);

  auto diff = density_regularity_checks(presets::diffusion_dominated(1, 1.0), {0.5, 1, 2}, {1, 2});
  CHECK(std::isfinite(diff.c17));
  CHECK_FALSE(diff.c17_growth);

  auto sup = density_regularity_checks(presets::superexponential(1, 1, 1, 2, 0), {0.5, 1, 2}, {1, 2});
  CHECK(std::isfinite(sup.c17));
}
