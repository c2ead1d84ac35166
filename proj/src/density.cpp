#include "levy/density.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <numbers>

#include "levy/errors.hpp"
#include "levy/fft.hpp"
#include "levy/quadrature.hpp"
#include "levy/spectral.hpp"

namespace levy {

namespace {
constexpr double kPi = std::numbers::pi;

double spectral_factor(int d) {
  // (2 pi)^{-d} |S^{d-1}|
  switch (d) {
    case 1: return 1.0 / kPi;
    case 2: return 1.0 / (2.0 * kPi);
    default: return 1.0 / (2.0 * kPi * kPi);
  }
}

double radial_kernel(int d, double u) {
  if (d == 2) return std::cyl_bessel_j(0.0, u);
  if (d == 3) return u < 1e-8 ? 1.0 : std::sin(u) / u;
  return std::cos(u);
}
}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

double cutoff_frequency(const LevyModel& m, double t, double level) {
  if (!(t > 0)) throw DomainError("transition density needs t > 0");
  double k = 1.0;
  while (t * m.psi(k) < level) {
    k *= 2;
    if (k > 1e8)
      throw DomainError("exp(-t psi) does not decay at t = " + std::to_string(t) +
                        "; the density is not available by Fourier inversion here, use a larger t");
  }
  double lo = k / 2, hi = k;
  for (int i = 0; i < 40 && hi - lo > 1e-6 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (t * m.psi(mid) < level ? lo : hi) = mid;
  }
  return hi;
}

double density_at_origin(const LevyModel& m, double t) {
  double ks = cutoff_frequency(m, t, 45.0);
  int d = m.dim();
  auto f = [&](double k) { return std::exp(-t * m.psi(k)) * std::pow(k, d - 1); };
  QuadOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-11;
  return spectral_factor(d) * integrate_split(f, 0.0, ks, 32, o).value;
}

DensitySlice transition_density(const LevyModel& m, double t, const std::vector<double>& grid,
                                const DensityOptions& opt) {
  if (grid.empty()) throw ConfigError("density grid is empty");
  DensitySlice out;
  out.t = t;
  out.x = grid;
  out.clip_threshold = opt.clip_threshold;
  const double ks = cutoff_frequency(m, t);
  const int d = m.dim();
  const std::size_t n = grid.size();
  double hu = n > 1 ? grid[1] - grid[0] : 0.05;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((grid[i] - grid[i - 1]) - hu) > 1e-9 * std::max(1.0, std::abs(hu)))
      throw ConfigError("density grid must be uniform");

  out.values.assign(n, 0.0);
  if (d == 1) {
    const int q = std::max(1, static_cast<int>(std::ceil(hu * ks / kPi)));
    const double h = hu / q;
    double amax = 0;
    for (double x : grid) amax = std::max(amax, std::abs(x));
    double extent = std::max({grid.back() - grid.front(), 2 * amax, 1.0});
    double period = std::max(opt.period_factor * extent, opt.min_period);
    // periodic images of a power tail decay only like P^-p; widen the period while the FFT stays moderate
    if (m.profile().power_tail()) period = std::max(period, std::min(2048.0, h * (1L << 22)));
    long M = next_power_of_two(static_cast<long>(std::ceil(period / h)));
    M = std::max<long>(M, next_power_of_two(static_cast<long>(q * n)) * 2);
    RealFFT fft(static_cast<int>(M));
    std::vector<std::complex<double>> c(M / 2 + 1);
    const double P = M * h, x0 = grid.front();
    const long kmax = std::min<long>(M / 2, static_cast<long>(1.5 * ks * P / (2 * kPi)));
    std::function<double(double)> psi = [&](double xi) { return m.psi(xi); };
    std::optional<SymbolInterpolant> interp;
    if (m.closed_form().kind == ClosedForm::Kind::none && kmax >= 512) {
      const double dxi = 2 * kPi / P;
      interp.emplace(m, dxi, kmax * dxi, 1e-10, 4 * dxi);
      psi = [&](double xi) { return (*interp)(xi); };
    }
    for (long k = 0; k <= kmax; ++k) {
      double xi = 2 * kPi * k / P;
      double w = std::exp(-t * psi(xi)) / P;
      c[k] = w * std::polar(1.0, xi * x0);
    }
    std::vector<double> full(M);
    fft.inverse(c.data(), full.data());
    for (std::size_t i = 0; i < n; ++i) out.values[i] = full[i * q];
  } else {
    QuadOptions o;
    o.abs_tol = 1e-15;
    o.rel_tol = 1e-10;
    o.throw_on_failure = false;
    for (std::size_t i = 0; i < n; ++i) {
      double r = std::abs(grid[i]);
      auto f = [&](double k) { return std::exp(-t * m.psi(k)) * std::pow(k, d - 1) * radial_kernel(d, k * r); };
      int pieces = std::max(16, static_cast<int>(1.5 * ks * r / kPi));
      out.values[i] = spectral_factor(d) * integrate_split(f, 0.0, 1.5 * ks, pieces, o).value;
    }
  }

  out.min_raw = *std::min_element(out.values.begin(), out.values.end());
  for (double& v : out.values) {
    if (v < 0 && v >= -opt.clip_threshold) v = 0;
    else if (v < -opt.clip_threshold) ++out.violations;
  }
  double mass = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    double rad = d == 1 ? 1.0 : m.sphere_area() * std::pow(std::abs(grid[i]), d - 1);
    mass += w * out.values[i] * rad;
  }
  out.mass = mass * hu;
  return out;
}

RegularityReport density_regularity_checks(const LevyModel& m, const std::vector<double>& t_set,
                                           const std::vector<double>& r_set, double radius) {
  if (t_set.empty() || r_set.empty()) throw ConfigError("regularity checks need non-empty t and r sets");
  RegularityReport rep;
  rep.t_set = t_set;
  rep.r_set = r_set;
  rep.radius = radius;
  const int d = m.dim();
  const double rmax = *std::max_element(r_set.begin(), r_set.end());
  const double X = std::max(4 * rmax + 2, 8.0);
  for (double t : t_set) {
    double ks = cutoff_frequency(m, t);
    double h = std::min(0.05, kPi / ks);
    int half = static_cast<int>(std::ceil(X / h));
    std::vector<double> grid = d == 1 ? linspace(-half * h, half * h, 2 * half + 1) : linspace(0, half * h, half + 1);
    auto slice = transition_density(m, t, grid);
    // radial profile on x >= 0
    std::vector<double> r, p;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] >= -1e-12) {
        r.push_back(std::abs(grid[i]));
        p.push_back(slice.values[i]);
      }
    double pmax = *std::max_element(p.begin(), p.end());
    double c17 = 1.0;
    int w = static_cast<int>(std::floor(1.0 / h + 1e-9));
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] < radius || p[i] < 1e-10 * pmax) continue;
      for (int k = 1; k <= w && i >= static_cast<std::size_t>(k); ++k) {
        std::size_t j = i - k;
        if (r[j] < radius || p[j] < 1e-10 * pmax) continue;
        c17 = std::max(c17, p[i] / p[j]);
      }
    }
    rep.c17_per_t.push_back(c17);
    rep.c17 = std::max(rep.c17, c17);
    std::vector<double> row;
    for (double rr : r_set) {
      double sup = 0;
      for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= rr - 1e-12) sup = std::max(sup, p[i]);
      double ref = t * m.big_psi(1.0 / rr) / std::pow(rr, d);
      row.push_back(sup / ref);
      rep.c9 = std::max(rep.c9, sup / ref);
    }
    rep.c9_table.push_back(row);
  }
  auto grows = [](const std::vector<double>& v) {
    if (v.size() < 3) return false;
    std::size_t n = v.size();
    double mx = *std::max_element(v.begin(), v.end());
    // flagged only when the last step grows at least as fast as the one before it
    double q1 = v[n - 2] / v[n - 3], q2 = v[n - 1] / v[n - 2];
    return v[n - 1] >= mx && q2 > 1.25 && q2 >= q1;
  };
  for (auto& row : rep.c9_table) rep.c9_growth = rep.c9_growth || grows(row);
  for (std::size_t j = 0; j < r_set.size(); ++j) {
    std::vector<double> col;
    for (auto& row : rep.c9_table) col.push_back(row[j]);
    rep.c9_growth = rep.c9_growth || grows(col);
  }
  rep.c17_growth = grows(rep.c17_per_t);
  return rep;
}

}  // namespace levy
