#include "levy/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levy/decay.hpp"
#include "levy/density.hpp"
#include "levy/quadrature.hpp"

namespace levy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

QuadOptions relative(double rel) {
  QuadOptions o;
  o.abs_tol = 0;
  o.rel_tol = rel;
  o.max_intervals = 4000;
  o.throw_on_failure = false;
  return o;
}

/// \int_a^b f on geometric segments a, a + 1/4, a + 1/2, a + 1, ... (b may be +inf).
double segmented(const Integrand& f, double a, double b, double rel, const std::vector<double>& breaks = {}) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double w = 0.25; a + w < b && a + w < a + 1e7; w *= 2) cuts.push_back(a + w);
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], relative(rel)).value;
  if (std::isfinite(b)) {
    if (cuts.back() < b) total += integrate(f, cuts.back(), b, relative(rel)).value;
  } else {
    total += integrate_tail(f, cuts.back(), relative(rel)).value;
  }
  return total;
}

double sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2 * kPi;
    default: return 4 * kPi;
  }
}

/// Relative change of a running sup over the last doubling window.
double growth(const std::vector<double>& x, const std::vector<double>& v, double x_split) {
  double before = 0, all = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    all = std::max(all, v[i]);
    if (x[i] <= x_split) before = std::max(before, v[i]);
  }
  return before > 0 ? all / before : INFINITY;
}

}  // namespace

// ---------------------------------------------------------------- K1

double k1_ratio(const LevyModel& m, double s, double x, double rel_tol) {
  if (!(s >= 1)) throw DomainError("K1 needs s >= 1");
  if (!(x >= s)) throw DomainError("K1 ratio needs |x| >= s");
  const double base = m.log_nu_radial(x);
  auto lnu = [&](double r) { return m.log_nu_radial(r); };
  if (m.dim() == 1) {
    auto left = [&](double u) { return std::exp(lnu(u) + lnu(x + u) - base); };
    auto mid = [&](double y) { return std::exp(lnu(y) + lnu(x - y) - base); };
    double v = 2 * segmented(left, s, INFINITY, rel_tol, {1.0});
    if (x > 2 * s) v += 2 * segmented(mid, s, 0.5 * x, rel_tol, {1.0, x - 1.0});
    return v;
  }
  // polar coordinates around the origin, axis along x
  const int d = m.dim();
  const double area_axis = d == 2 ? 2.0 : 2 * kPi;
  auto outer = [&](double rho) {
    double c0 = (x * x + rho * rho - s * s) / (2 * x * rho);
    if (c0 <= -1) return 0.0;
    double th0 = c0 >= 1 ? 0.0 : std::acos(c0);
    auto inner = [&](double th) {
      double r2 = x * x + rho * rho - 2 * x * rho * std::cos(th);
      double r = std::sqrt(std::max(r2, s * s));
      double w = d == 2 ? 1.0 : std::sin(th);
      return std::exp(lnu(r) - base) * w;
    };
    double in = integrate(inner, th0, kPi, relative(rel_tol)).value;
    return std::exp(lnu(rho)) * std::pow(rho, d - 1) * in;
  };
  return area_axis * segmented(outer, s, INFINITY, rel_tol, {x - s, x, x + s});
}

K1Result k1(const LevyModel& m, double s, const SupOptions& opt) {
  K1Result out;
  out.s = s;
  const int ppd = std::max(2, opt.points_per_doubling);
  double prev_sup = 0;
  for (int j = 0; j <= opt.max_doublings * ppd; ++j) {
    double x = s * std::exp2(static_cast<double>(j) / ppd);
    double r = k1_ratio(m, s, x, opt.rel_tol);
    out.x.push_back(x);
    out.ratio.push_back(r);
    if (r > out.value) {
      out.value = r;
      out.x_at = x;
    }
    out.x_max = x;
    if (j > 0 && j % ppd == 0) {
      int doubling = j / ppd;
      if (doubling >= opt.min_doublings && prev_sup > 0 && out.value - prev_sup < opt.stabilization * out.value) {
        out.stabilized = true;
        break;
      }
      prev_sup = out.value;
    }
  }
  return out;
}

// ---------------------------------------------------------------- K2

K2Result k2_search(const LevyModel& m, double s1, double s2, double s3) {
  if (!(s1 > 0 && s2 > s1 && s3 > s2)) throw DomainError("K2 needs 0 < s1 < s2 < s3");
  K2Result out;
  const bool table = std::holds_alternative<UserTable>(m.profile().spec());
  out.antipodal = !table;
  // |x| nodes: s2 plus geometric offsets, clustered at s2 where the ratio peaks for monotone nu
  std::vector<double> xs{s2};
  const double x_end = std::isfinite(s3) ? s3 : std::max(1e4 * s2, 1e3 * s1);
  for (double u = 1e-6 * s2; s2 + u < x_end; u *= std::exp2(0.25)) xs.push_back(s2 + u);
  if (std::isfinite(s3)) xs.push_back(std::nextafter(s3, s2));
  auto log_ratio = [&](double x, double* at) {
    const double lx = m.log_nu_radial(x);
    if (!table) {
      if (at) *at = x - s1;
      return m.log_nu_radial(x - s1) - lx;
    }
    double best = -INFINITY;
    for (int k = 0; k <= 64; ++k) {
      double r = x - s1 + 2 * s1 * k / 64.0;
      double v = m.log_nu_radial(r) - lx;
      if (v > best) {
        best = v;
        if (at) *at = r;
      }
    }
    return best;
  };
  double best = -INFINITY;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double at = 0;
    double v = log_ratio(xs[i], &at);
    if (table && at > xs[i] - s1 + 1e-12) out.inconclusive = true;  // the table is not monotone there
    if (v > best * (1 + 1e-12) + 1e-12 || i == 0) {
      best = v;
      arg = i;
    }
  }
  if (!std::isfinite(s3) && arg + 1 == xs.size() && xs.size() > 2) {
    out.value = INFINITY;  // still growing at the end of the sampled range
    out.x_at = xs.back();
    return out;
  }
  // golden-section polish around an interior maximizer
  if (arg > 0 && arg + 1 < xs.size()) {
    double a = xs[arg - 1], b = xs[arg + 1];
    const double gr = 0.5 * (std::sqrt(5.0) - 1);
    for (int it = 0; it < 60; ++it) {
      double c = b - gr * (b - a), d = a + gr * (b - a);
      if (log_ratio(c, nullptr) > log_ratio(d, nullptr)) b = d;
      else a = c;
    }
    double v = log_ratio(0.5 * (a + b), nullptr);
    if (v > best) {
      best = v;
      xs[arg] = 0.5 * (a + b);
    }
  }
  out.x_at = xs[arg];
  out.value = std::max(1.0, std::exp(best));
  return out;
}

double k2(const LevyModel& m, double s1, double s2, double s3) { return k2_search(m, s1, s2, s3).value; }

double measure_c15(const LevyModel& m, const std::vector<double>& radii) {
  double c = 1;
  for (double r : radii) c = std::max(c, k2(m, r, 2 * r, INFINITY));
  return c;
}

// ---------------------------------------------------------------- K3 bound

double psi_doubling(const LevyModel& m, double r_lo, double r_hi, int samples) {
  double c = 1;
  for (int i = 0; i < samples; ++i) {
    double r = r_lo * std::pow(r_hi / r_lo, samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.0);
    double a = m.big_psi(r);
    if (a > 0) c = std::max(c, m.big_psi(2 * r) / a);
  }
  return c;
}

double psi_inverse_lower(const LevyModel& m, double level) {
  if (!(level > 0)) return 0.0;
  double lo = 0, hi = 1;
  while (m.big_psi(hi) < level) {
    lo = hi;
    hi *= 2;
    if (hi > 1e12) throw DomainError("Psi does not reach the requested level");
  }
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (m.big_psi(mid) >= level) hi = mid;
    else lo = mid;
  }
  return hi;
}

double measure_c10(const LevyModel& m, const std::vector<double>& t_set) {
  double c = 0;
  for (double t : t_set) {
    double p0 = std::pow(2 * kPi, m.dim()) * density_at_origin(m, t);
    double r = psi_inverse_lower(m, 1.0 / t);
    c = std::max(c, p0 / std::pow(r, m.dim()));
  }
  return c;
}

K3Bound k3_upper(const LevyModel& m, double s, const K3Constants& k) {
  if (!(s >= 1)) throw DomainError("K3 bound needs s >= 1");
  if (!k.c9 || !k.c10 || !k.c4) throw ConfigError("constants required: C9, C10 and C4 must all be supplied", "/k3");
  const int d = m.dim();
  const double C = k.doubling ? *k.doubling : psi_doubling(m, 0.5 / s, 16.0 / s, 9);
  double c1 = 0, c2 = 0;
  if (k.c1 && k.c2) {
    c1 = *k.c1;
    c2 = *k.c2;
  } else {
    auto pc = pruitt_comparability(m, 0.5 / s, 16.0 / s, 9);
    c1 = pc.c1;
    c2 = pc.c2;
  }
  const double P = m.big_psi(1.0 / s);
  const double sd = std::pow(s, d);
  K3Bound b;
  b.s = s;
  b.terms[0] = std::pow(8.0, d) * kE * C * C * C * *k.c9 / (P * sd);
  b.terms[1] = k.theta > 0 ? kE * *k.c9 * k.theta / (P * P) : 0.0;
  b.terms[2] = 4 * c1 * c2 * *k.c4 * *k.c10 / (P * sd);
  b.value = b.terms[0] + b.terms[1] + b.terms[2];
  b.green_diagnostic = b.value * P * sd;
  return b;
}

// ---------------------------------------------------------------- C3

void bump(double r, double& f, double& f1, double& f2) {
  if (r <= 0.5) {
    f = 1, f1 = 0, f2 = 0;
    return;
  }
  if (r >= 1) {
    f = 0, f1 = 0, f2 = 0;
    return;
  }
  double t = 2 * (r - 0.5);
  double t2 = t * t, t3 = t2 * t;
  f = 1 - (6 * t3 * t2 - 15 * t2 * t2 + 10 * t3);
  f1 = -2 * (30 * t2 * t2 - 60 * t3 + 30 * t2);
  f2 = -4 * (120 * t3 - 180 * t2 + 60 * t);
}

double generator_on_bump(const LevyModel& m, double s, double r) {
  const int d = m.dim();
  auto fs = [&](double u) {
    double f, f1, f2;
    bump(std::abs(u) / s, f, f1, f2);
    return f;
  };
  double f, f1, f2;
  bump(r / s, f, f1, f2);
  const double lap = f2 / (s * s) + (r > 0 ? (d - 1) * f1 / (s * r) : (d - 1) * f2 / (s * s));
  double out = m.diffusion() * lap;

  // sphere average of f_s(|x + rho theta|)
  auto average = [&](double rho) {
    if (d == 1) return 0.5 * (fs(r + rho) + fs(r - rho));
    if (r == 0) return fs(rho);
    if (d == 3) {
      auto g = [&](double u) { return fs(u) * u; };
      double lo = std::abs(r - rho), hi = r + rho;
      std::vector<double> cuts{lo};
      for (double c : {0.5 * s, s})
        if (c > lo && c < hi) cuts.push_back(c);
      cuts.push_back(hi);
      double v = 0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) v += integrate(g, cuts[i], cuts[i + 1], relative(1e-10)).value;
      return v / (2 * r * rho);
    }
    auto g = [&](double phi) { return fs(std::sqrt(r * r + rho * rho + 2 * r * rho * std::cos(phi))); };
    return integrate(g, 0, kPi, relative(1e-10)).value / kPi;
  };

  const double rho0 = 1e-3 * s;
  out += lap / (2 * d) * m.second_moment_inside(rho0);
  const double area = sphere_area(d);
  auto integrand = [&](double rho) {
    return m.nu_radial(rho) * std::pow(rho, d - 1) * area * (average(rho) - f);
  };
  std::vector<double> cuts{rho0};
  for (double c : {std::abs(r - 0.5 * s), std::abs(r - s), r + 0.5 * s, 1.0})
    if (c > rho0 && c < r + s) cuts.push_back(c);
  cuts.push_back(r + s);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadOptions o;
    o.abs_tol = 1e-12;
    o.rel_tol = 1e-9;
    o.throw_on_failure = false;
    out += integrate(integrand, cuts[i], cuts[i + 1], o).value;
  }
  if (f != 0) out -= f * m.tail_mass(r + s);
  return out;
}

C3Result c3_bound(const LevyModel& m, double s, int nodes) {
  if (!(s > 0)) throw DomainError("C3 bound needs s > 0");
  C3Result out;
  out.s = s;
  out.nodes = nodes;
  const double span = 1.25 * s;
  std::vector<double> v(nodes);
  int arg = 0;
  for (int i = 0; i < nodes; ++i) {
    v[i] = std::abs(generator_on_bump(m, s, span * i / (nodes - 1)));
    if (v[i] > v[arg]) arg = i;
  }
  out.value = v[arg];
  out.x_at = span * arg / (nodes - 1);
  if (arg > 0 && arg + 1 < nodes) {
    double a = span * (arg - 1) / (nodes - 1), b = span * (arg + 1) / (nodes - 1);
    const double gr = 0.5 * (std::sqrt(5.0) - 1);
    auto F = [&](double r) { return std::abs(generator_on_bump(m, s, r)); };
    for (int it = 0; it < 40; ++it) {
      double c = b - gr * (b - a), d = a + gr * (b - a);
      if (F(c) > F(d)) b = d;
      else a = c;
    }
    double r = 0.5 * (a + b), val = F(r);
    if (val > out.value) {
      out.value = val;
      out.x_at = r;
    }
  }
  return out;
}

// ---------------------------------------------------------------- exit times and K3 sources

ExitTimeSource ExitTimeSource::monte_carlo(const LevyModel& m, PathConfig cfg) {
  ExitTimeSource e;
  e.model_ = &m;
  e.cfg_ = cfg;
  return e;
}

ExitTimeSource ExitTimeSource::analytic(const LevyModel& m, double c4) {
  if (!(c4 > 0)) throw ConfigError("C4 must be positive", "/exit/c4");
  ExitTimeSource e;
  e.model_ = &m;
  e.c4_ = c4;
  return e;
}

ExitTimeSource ExitTimeSource::with_analytic(double c4) const {
  if (!(c4 > 0)) throw ConfigError("C4 must be positive", "/exit/c4");
  ExitTimeSource e = *this;
  e.c4_ = c4;
  return e;
}

ExitTimeEstimate ExitTimeSource::run(double r, double t) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto key = std::make_pair(r, t);
  auto it = cache_->runs.find(key);
  if (it != cache_->runs.end()) return it->second;
  PathConfig cfg = *cfg_;
  // the horizon must comfortably exceed the mean exit time; scale it with the analytic rate
  cfg.horizon = std::max(cfg.horizon, 50.0 / model_->big_psi(1.0 / r));
  auto est = exit_time_ball(*model_, cfg, r, t);
  cache_->runs.emplace(key, est);
  return est;
}

ExitTimeSource::Value ExitTimeSource::expected(double r) const {
  if (cfg_) {
    auto e = run(r, 1.0);
    return {e.mean, e.ci_halfwidth, "monte-carlo"};
  }
  return {*c4_ / model_->big_psi(1.0 / r), 0.0, "analytic"};
}

double ExitTimeSource::expected_upper(double r) const {
  if (c4_) return *c4_ / model_->big_psi(1.0 / r);
  auto e = run(r, 1.0);
  return e.mean + e.ci_halfwidth;
}

ExitTimeSource::Value ExitTimeSource::survival(double r, double t) const {
  if (!cfg_) throw ConfigError("survival probability needs the Monte Carlo exit-time source", "/exit");
  auto e = run(r, t);
  return {e.survival, e.survival_ci, "monte-carlo"};
}

K3Source K3Source::bound(const LevyModel& m, K3Constants k) {
  K3Source s;
  s.model_ = &m;
  s.k_ = k;
  return s;
}

K3Source K3Source::monte_carlo(const LevyModel& m, PathConfig cfg) {
  K3Source s;
  s.model_ = &m;
  s.cfg_ = cfg;
  return s;
}

K3Source K3Source::with_bound(K3Constants k) const {
  K3Source s = *this;
  s.k_ = k;
  return s;
}

std::string K3Source::method() const {
  if (cfg_ && k_) return "monte-carlo+bound";
  return cfg_ ? "monte-carlo" : "bound";
}

double K3Source::best(double s) const {
  if (!cfg_) return upper(s);
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->runs.find(s);
  if (it == cache_->runs.end()) it = cache_->runs.emplace(s, green_sup_mc(*model_, *cfg_, s, s / 8)).first;
  return it->second.sup;
}

double K3Source::upper(double s) const {
  if (k_) return k3_upper(*model_, std::max(s, 1.0), *k_).value;
  double b = best(s);
  std::lock_guard<std::mutex> lock(cache_->mu);
  return b + cache_->runs.at(s).ci_halfwidth;
}

// ---------------------------------------------------------------- h1, h2, eta0, cond1

HIngredients h_functions(const LevyModel& m, double s1, double s2, double exit_mean, double k3) {
  if (!(s1 >= 1 && s2 >= 2 * s1)) throw DomainError("h1/h2 need s1 >= 1 and s2 >= 2 s1");
  HIngredients h;
  h.s1 = s1;
  h.s2 = s2;
  h.k2_main = k2(m, s1, s2, INFINITY);
  h.k2_inner = k2(m, s1 / 4, s1 / 2, s1);
  h.c3_small = c3_bound(m, s1 / 16).value;
  h.c3_large = c3_bound(m, s1).value;
  h.k3 = k3;
  h.exit_mean = exit_mean;
  h.c13 = k3 + exit_mean / m.ball_volume(s1 / 4) * h.k2_inner * h.k2_inner;
  h.nu_sup_quarter = m.nu_radial(s1 / 4);
  h.nu_sup_sixteenth = m.nu_radial(s1 / 16);
  h.h1 = h.k2_main * (h.c3_small * (h.c13 * m.ball_volume(s1) + exit_mean) + 1);
  h.h2 = h.c3_small * (h.c3_large * h.c13 + exit_mean * h.nu_sup_quarter) + h.nu_sup_sixteenth;
  return h;
}

double h1(const LevyModel& m, double s1, double s2, const ExitTimeSource& exit, const K3Source& k3) {
  return h_functions(m, s1, s2, exit.expected(2 * s1).value, k3.best(s1)).h1;
}

double h2(const LevyModel& m, double s1, const ExitTimeSource& exit, const K3Source& k3) {
  return h_functions(m, s1, 2 * s1, exit.expected(2 * s1).value, k3.best(s1)).h2;
}

namespace {

/// Rescales the exit-time dependent parts of h without recomputing C3 and K2.
HIngredients with_exit(HIngredients h, const LevyModel& m, double exit_mean, double k3) {
  h.exit_mean = exit_mean;
  h.k3 = k3;
  h.c13 = k3 + exit_mean / m.ball_volume(h.s1 / 4) * h.k2_inner * h.k2_inner;
  h.h1 = h.k2_main * (h.c3_small * (h.c13 * m.ball_volume(h.s1) + exit_mean) + 1);
  h.h2 = h.c3_small * (h.c3_large * h.c13 + exit_mean * h.nu_sup_quarter) + h.nu_sup_sixteenth;
  return h;
}

}  // namespace

Eta0Result eta0(const LevyModel& m, const ExitTimeSource& exit, const K3Source& k3) {
  Eta0Result r;
  r.c5 = m.c5();
  auto K1 = k1(m, 2);
  r.k1_2 = K1.value;
  r.k1_stabilized = K1.stabilized;
  r.k2_23 = k2(m, 2, 3, INFINITY);
  auto ev = exit.expected(2);
  r.best = h_functions(m, 1, 2, ev.value, k3.best(1));
  r.upper = with_exit(r.best, m, exit.expected_upper(2), k3.upper(1));
  const double pre = 2 * std::pow(r.c5, 4);
  const double b2 = m.ball_volume(2);
  auto assemble = [&](const HIngredients& h) { return pre * h.h1 * r.k1_2 + h.h2 * b2 * r.k2_23; };
  r.value = assemble(r.best);
  r.lo = assemble(with_exit(r.best, m, std::max(0.0, ev.value - ev.ci_halfwidth), r.best.k3));
  r.hi = assemble(with_exit(r.best, m, ev.value + ev.ci_halfwidth, r.best.k3));
  r.conservative = assemble(r.upper);
  return r;
}

Cond1Result cond1_check(const LevyModel& m, double r1, double r2, double r3, double eta, const ExitTimeSource& exit,
                        const K3Source& k3, double harmonic_radius) {
  if (!(r1 >= 1 && r2 >= 2 * r1 && r3 > r2)) throw DomainError("cond1 needs r1 >= 1, r2 >= 2 r1, r3 > r2");
  Cond1Result c;
  c.r1 = r1;
  c.r2 = r2;
  c.r3 = r3;
  c.eta = eta;
  const double c5 = m.c5();
  auto K1 = k1(m, r2);
  const double k2v = k2(m, r2, r3, INFINITY);
  auto ev = exit.expected(2 * r1);
  auto h = h_functions(m, r1, r2, ev.value, k3.best(r1));
  auto h_hi = with_exit(h, m, ev.value + ev.ci_halfwidth, h.k3);
  auto h_up = with_exit(h, m, exit.expected_upper(2 * r1), k3.upper(r1));
  const double b2 = m.ball_volume(r2);
  auto lhs = [&](const HIngredients& x) { return 2 * std::pow(c5, 4) * x.h1 * K1.value + x.h2 * b2 * k2v; };
  c.lhs = lhs(h);
  c.lhs_hi = lhs(h_hi);
  c.lhs_conservative = lhs(h_up);
  c.margin = eta - c.lhs_hi;
  c.R = std::max(harmonic_radius + r1, r3);
  auto lo = with_exit(h, m, std::max(0.0, ev.value - ev.ci_halfwidth), h.k3);
  if (!(eta > 0) || lhs(lo) >= eta) {
    c.verdict = Verdict::fail;
  } else if (c.lhs_hi < eta && K1.stabilized && std::isfinite(k2v)) {
    c.verdict = Verdict::pass;
  } else {
    c.verdict = Verdict::inconclusive;
  }
  if (c.verdict == Verdict::pass) {
    const double c6 = measure_c6(m, std::ceil(c.R) + 1);
    double c8 = 1;
    if (m.dim() == 1) c8 = std::max(1.0, shell_constant(m, {1, 2, 4}).c8);
    const double denom = eta - h_hi.h1 * K1.value - h_hi.h2 * b2 * k2v;
    c.c14 = c5 * c5 * std::pow(c6, std::ceil(c.R)) * (1 + c8) * (h_hi.h1 + h_hi.h2 / m.nu_radial(r2)) *
            m.ball_volume(c.R) / denom;
  }
  return c;
}

// ---------------------------------------------------------------- jump paring, smallness

JumpParingAudit jump_paring_audit(const LevyModel& m, std::vector<double> x_grid) {
  if (x_grid.empty())
    for (int j = 0; j <= 14 * 8; ++j) x_grid.push_back(std::exp2(j / 8.0));
  std::sort(x_grid.begin(), x_grid.end());
  if (x_grid.front() < 1) throw ConfigError("jump-paring grid must lie in |x| >= 1", "/x_grid");
  JumpParingAudit a;
  a.x = x_grid;
  for (double x : x_grid) {
    double r = k1_ratio(m, 1.0, x) / m.scale();
    a.ratio.push_back(r);
    if (r > a.c7) {
      a.c7 = r;
      a.x_at = x;
    }
  }
  const double xm = x_grid.back();
  a.last_doubling_growth = growth(a.x, a.ratio, 0.5 * xm);
  if (!std::isfinite(a.c7)) {
    // the convolution overflows relative to the profile: double jumps dominate
    a.last_doubling_growth = INFINITY;
    a.verdict = Verdict::fail;
  } else if (a.last_doubling_growth < 1.01) {
    a.verdict = Verdict::pass;
  } else {
    // unbounded growth: the sup over each of the last three doublings keeps increasing
    bool increasing = true;
    for (int k = 1; k <= 3; ++k)
      if (growth(a.x, a.ratio, xm / std::exp2(k)) < 1.01) increasing = false;
    a.verdict = increasing ? Verdict::fail : Verdict::inconclusive;
  }
  return a;
}

SmallnessReport smallness_checks(const LevyModel& m, double kappa1, const std::vector<double>& s_set,
                                 const std::vector<double>& s1_set, std::optional<double> kappa2) {
  if (!(kappa1 >= 2)) throw ConfigError("kappa1 must be >= 2", "/kappa1");
  SmallnessReport r;
  r.kappa1 = kappa1;
  r.s_set = s_set;
  bool stabilized = true;
  for (double s : s_set) {
    auto K1 = k1(m, kappa1 * s);
    stabilized = stabilized && K1.stabilized;
    r.product.push_back(K1.value * k2(m, s, kappa1 * s, INFINITY));
  }
  bool decreasing = true;
  r.killing_margin = 0;
  for (std::size_t i = 0; i + 1 < r.product.size(); ++i) {
    double q = r.product[i + 1] / r.product[i];
    r.killing_margin = std::max(r.killing_margin, q);
    if (!(q < 1)) decreasing = false;
  }
  if (!stabilized) r.killing = Verdict::inconclusive;
  else if (decreasing) r.killing = Verdict::pass;
  else if (!r.product.empty() && r.product.back() >= r.product.front()) r.killing = Verdict::fail;
  else r.killing = Verdict::inconclusive;

  r.s1_set = s1_set;
  r.kappa2 = kappa2;
  double s_last = s_set.empty() ? 1.0 : s_set.back();
  for (double s1 : s1_set) {
    r.s_tail = std::max(64 * s1, s_last);
    r.limsup.push_back(k2(m, s1, std::max(64 * s1, s_last), INFINITY));
  }
  if (r.limsup.empty()) return r;
  const double hi = *std::max_element(r.limsup.begin(), r.limsup.end());
  const double lo = *std::min_element(r.limsup.begin(), r.limsup.end());
  r.bounded_margin = hi / lo;
  if (kappa2) {
    r.bounded = hi <= *kappa2 ? Verdict::pass : Verdict::fail;
  } else {
    bool increasing = true;
    for (std::size_t i = 0; i + 1 < r.limsup.size(); ++i)
      if (!(r.limsup[i + 1] > r.limsup[i])) increasing = false;
    if (!std::isfinite(hi)) r.bounded = Verdict::fail;
    else if (r.bounded_margin <= 2) r.bounded = Verdict::pass;
    else if (increasing && r.bounded_margin > 10) r.bounded = Verdict::fail;
    else r.bounded = Verdict::inconclusive;
  }
  return r;
}

// ---------------------------------------------------------------- subexponentiality probe

namespace {

/// log of nu(B(0,u)^c) in d = 1, kept in log form because light tails underflow.
double log_tail_1d(const LevyModel& m, double u) {
  const double base = m.log_nu_radial(u);
  auto f = [&](double r) { return std::exp(m.log_nu_radial(r) - base); };
  return base + std::log(2 * segmented(f, u, INFINITY, 1e-10));
}

/// P(|J1 + J2| > r) / P(|J1| > r) by quadrature, d = 1, r >= 2.
double subexp_ratio_quadrature(const LevyModel& m, double r) {
  const double lT1 = log_tail_1d(m, 1.0);
  const double lTr = log_tail_1d(m, r) - lT1;  // log P(|J| > r)
  auto lT = [&](double u) { return log_tail_1d(m, u) - lT1; };
  auto lbar = [&](double y) { return m.log_nu_radial(y) - lT1; };  // log density of J at |y| >= 1
  // P(J1 + J2 > r) / P(|J| > r), split by the position of J1 = y
  auto a = [&](double y) { return std::exp(lbar(y) + lT(r - y) - lTr) / 2; };
  auto b = [&](double y) { return std::exp(lbar(y) - lTr) / 2; };
  auto c = [&](double y) { return std::exp(lbar(y) - lTr) * (1 - std::exp(lT(y - r)) / 2); };
  auto e = [&](double y) { return std::exp(lbar(y) + lT(r + y) - lTr) / 2; };
  double v = 0;
  if (r - 1 > 1) v += segmented(a, 1.0, r - 1, 1e-8);
  v += integrate(b, std::max(1.0, r - 1), r + 1, relative(1e-10)).value;
  v += segmented(c, r + 1, INFINITY, 1e-8, {r + 2});
  v += segmented(e, 1.0, INFINITY, 1e-8);
  return 2 * v;
}

}  // namespace

SubexpProbe subexponentiality_probe(const LevyModel& m, const std::vector<double>& r_set, long n_samples,
                                    std::uint64_t seed) {
  SubexpProbe p;
  JumpSampler js(m, 1.0);
  const int d = m.dim();
  struct Acc {
    std::vector<long> sum, single;
  };
  const std::size_t nr = r_set.size();
  auto parts = run_chunks<Acc>(n_samples, worker_count(0), [&](long ch, long b, long e, Acc& acc) {
    Rng rng = chunk_rng(seed, ch);
    acc.sum.assign(nr, 0);
    acc.single.assign(nr, 0);
    std::vector<double> j1(d), j2(d);
    for (long i = b; i < e; ++i) {
      js.sample(rng, j1.data());
      js.sample(rng, j2.data());
      double n1 = 0, n2 = 0, ns = 0;
      for (int k = 0; k < d; ++k) {
        n1 += j1[k] * j1[k];
        n2 += j2[k] * j2[k];
        ns += (j1[k] + j2[k]) * (j1[k] + j2[k]);
      }
      n1 = std::sqrt(n1), n2 = std::sqrt(n2), ns = std::sqrt(ns);
      for (std::size_t k = 0; k < nr; ++k) {
        acc.sum[k] += ns > r_set[k];
        acc.single[k] += (n1 > r_set[k]) + (n2 > r_set[k]);
      }
    }
  });
  std::vector<long> sum(nr, 0), single(nr, 0);
  for (auto& a : parts)
    for (std::size_t k = 0; k < nr; ++k) {
      sum[k] += a.sum[k];
      single[k] += a.single[k];
    }
  for (std::size_t k = 0; k < nr; ++k) {
    SubexpPoint pt;
    pt.r = r_set[k];
    if (single[k] >= 100 && sum[k] >= 100) {
      double pa = static_cast<double>(sum[k]) / n_samples;
      double pb = static_cast<double>(single[k]) / (2.0 * n_samples);
      pt.ratio = pa / pb;
      pt.ci_halfwidth = 1.96 * pt.ratio * std::sqrt((1 - pa) / (n_samples * pa) + (1 - pb) / (2.0 * n_samples * pb));
      pt.method = "monte-carlo";
    } else if (d == 1 && r_set[k] >= 2) {
      pt.ratio = subexp_ratio_quadrature(m, r_set[k]);
      pt.method = "quadrature";
    } else {
      pt.ratio = NAN;
      pt.method = "insufficient-samples";
    }
    p.points.push_back(pt);
  }
  // classification from the shape of the curve
  std::vector<double> v;
  for (auto& pt : p.points)
    if (std::isfinite(pt.ratio)) v.push_back(pt.ratio);
  if (v.size() < 2) {
    p.classification = "inconclusive";
    return p;
  }
  const auto& last = p.points.back();
  bool increasing = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (!(v[i + 1] > v[i])) increasing = false;
  const double tol = std::max(2 * last.ci_halfwidth, 0.05);
  if (std::abs(v.back() - 2) <= tol) p.classification = "subexponential";
  else if (increasing && v.back() > 1.5 * v.front()) p.classification = "divergent";
  else if (v.back() > 2) p.classification = "jump-paring-non-subexponential";
  else p.classification = "inconclusive";
  return p;
}

// ---------------------------------------------------------------- report

ConditionReport condition_report(const LevyModel& m, const ExitTimeSource& exit, const K3Source& k3,
                                 const ConditionOptions& opt) {
  ConditionReport rep;
  auto add = [&](std::string name, Verdict v, double margin, std::string note = {}) {
    rep.verdicts.push_back({std::move(name), v, margin, std::move(note)});
  };

  for (double s : opt.k1_s) rep.k1_samples.push_back(k1(m, s));
  {
    bool stab = true, mono = true;
    double worst = 0;
    for (std::size_t i = 0; i < rep.k1_samples.size(); ++i) {
      stab = stab && rep.k1_samples[i].stabilized;
      if (i > 0) {
        double q = rep.k1_samples[i].value / rep.k1_samples[i - 1].value;
        worst = std::max(worst, q);
        if (q > 1.01) mono = false;
      }
    }
    add("K1 non-increasing", !stab ? Verdict::inconclusive : mono ? Verdict::pass : Verdict::fail, worst,
        stab ? "" : "sup not stabilized for at least one s");
    double tail_worst = INFINITY;
    bool tail_ok = true;
    for (auto& k : rep.k1_samples) {
      double need = m.tail_mass(k.s) / (2 * std::pow(m.c5(), 4));
      tail_worst = std::min(tail_worst, k.value / need);
      if (k.value < need) tail_ok = false;
    }
    add("tail domination", tail_ok ? Verdict::pass : Verdict::fail, tail_worst);
  }

  double k2_min = INFINITY;
  for (auto s : opt.k2_s) {
    double v = k2(m, s[0], s[1], s[2]);
    rep.k2_samples.push_back({s, v});
    k2_min = std::min(k2_min, v);
  }
  add("K2 >= 1", k2_min >= 1 ? Verdict::pass : Verdict::fail, k2_min);

  rep.jump_paring = jump_paring_audit(m);
  add("jump-paring (A1.3)", rep.jump_paring.verdict, rep.jump_paring.last_doubling_growth);

  rep.smallness = smallness_checks(m, opt.kappa1, opt.smallness_s, opt.smallness_s1);
  add("intrinsic killing", rep.smallness.killing, rep.smallness.killing_margin);
  add("uniform boundedness", rep.smallness.bounded, rep.smallness.bounded_margin);
  rep.kappa2 = rep.smallness.limsup.empty()
                   ? 0
                   : *std::max_element(rep.smallness.limsup.begin(), rep.smallness.limsup.end());

  try {
    double lo = INFINITY, hi = 0;
    std::vector<double> diag;
    for (double s : opt.k3_s) {
      K3Bound b;
      b.s = s;
      b.value = k3.upper(s);
      const double d = b.value * m.big_psi(1.0 / s) * std::pow(s, m.dim());
      b.green_diagnostic = d;
      rep.k3_upper.push_back(b);
      diag.push_back(d);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    bool growing = diag.size() > 1;
    for (std::size_t i = 0; i + 1 < diag.size(); ++i)
      if (!(diag[i + 1] > diag[i])) growing = false;
    Verdict v = hi / lo <= 10 ? Verdict::pass : growing ? Verdict::fail : Verdict::inconclusive;
    add("Green bound", v, hi / lo, k3.method());
  } catch (const ConfigError& e) {
    add("Green bound", Verdict::inconclusive, 0, e.what());
  }

  rep.h = h_functions(m, opt.h_s1, opt.h_s2, exit.expected(2 * opt.h_s1).value, k3.best(opt.h_s1));
  rep.eta0 = eta0(m, exit, k3);
  add("eta0 finite", std::isfinite(rep.eta0.value) ? Verdict::pass : Verdict::inconclusive, rep.eta0.value);
  if (opt.eta) {
    Verdict v = Verdict::fail;
    double best_margin = -INFINITY;
    for (double r1 : opt.cond1_r1) {
      rep.cond1.push_back(cond1_check(m, r1, 2 * r1, 4 * r1, *opt.eta, exit, k3));
      const auto& c = rep.cond1.back();
      best_margin = std::max(best_margin, c.margin);
      if (c.verdict == Verdict::pass) v = Verdict::pass;
      else if (c.verdict == Verdict::inconclusive && v == Verdict::fail) v = Verdict::inconclusive;
    }
    add("cond1 lattice", v, best_margin);
  }
  return rep;
}

}  // namespace levy
