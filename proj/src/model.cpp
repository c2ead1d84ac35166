#include "levy/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levy/errors.hpp"
#include "levy/quadrature.hpp"

namespace levy {

namespace {

constexpr double kPi = std::numbers::pi;
// k*r beyond which oscillatory tails are handed to the Fourier rule
constexpr double kOsc = 64.0;

QuadOptions tight() {
  QuadOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-11;
  o.max_intervals = 20000;
  return o;
}

// \int_b^\infty f(r) j_d(k r) dr with j_1 = cos, j_2 = J_0, j_3 = sinc; requires k b >= kOsc.
QuadResult oscillatory_tail(int d, const Integrand& f, double b, double k) {
  if (d == 1) return fourier_cos_tail(f, b, k);
  if (d == 3) {
    auto fr = [&](double r) { return f(r) / r; };
    auto q = fourier_sin_tail(fr, b, k);
    q.value /= k;
    q.error /= k;
    return q;
  }
  // Hankel asymptotics of J_0, accurate to ~1e-12 for arguments above kOsc
  auto amp = [k](double r, bool plus) {
    double z = k * r, z2 = z * z;
    double P = 1.0 - 9.0 / (128.0 * z2) + 3675.0 / (32768.0 * z2 * z2);
    double Q = -1.0 / (8.0 * z) + 75.0 / (1024.0 * z2 * z) - 59535.0 / (262144.0 * z2 * z2 * z);
    double s = std::sqrt(2.0 / (kPi * z));
    return s * (plus ? P + Q : P - Q) / std::numbers::sqrt2;
  };
  auto fc = [&](double r) { return f(r) * amp(r, true); };
  auto fs = [&](double r) { return f(r) * amp(r, false); };
  auto c = fourier_cos_tail(fc, b, k);
  auto s = fourier_sin_tail(fs, b, k);
  return {c.value + s.value, c.error + s.error, c.evals + s.evals, true};
}

}  // namespace

double omega(int d, double u) {
  u = std::abs(u);
  switch (d) {
    case 1: {
      double s = std::sin(0.5 * u);
      return 2.0 * s * s;
    }
    case 2:
      if (u < 1e-2) {
        double u2 = u * u;
        return u2 / 4.0 - u2 * u2 / 64.0 + u2 * u2 * u2 / 2304.0;
      }
      return 1.0 - std::cyl_bessel_j(0.0, u);
    case 3:
      if (u < 1e-2) {
        double u2 = u * u;
        return u2 / 6.0 - u2 * u2 / 120.0 + u2 * u2 * u2 / 5040.0;
      }
      return 1.0 - std::sin(u) / u;
  }
  throw DomainError("omega: unsupported dimension");
}

double stable_constant(int d, double alpha) {
  if (!(alpha > 0 && alpha < 2)) throw ConfigError("stable index alpha must lie in (0,2)");
  return alpha * std::pow(2.0, alpha - 1) * std::tgamma((d + alpha) / 2.0) /
         (std::pow(kPi, d / 2.0) * std::tgamma(1.0 - alpha / 2.0));
}

LevyModel::LevyModel(int dim, double diffusion, Profile profile, double scale)
    : dim_(dim), a_(diffusion), profile_(std::move(profile)), scale_(scale) {
  if (dim < 1 || dim > 3) throw ConfigError("dimension must be 1, 2 or 3", "/dimension");
  if (profile_.dim() != dim) throw ConfigError("profile dimension does not match model dimension", "/profile");
  if (!(diffusion >= 0)) throw ConfigError("diffusion coefficient must be >= 0", "/diffusion");
  if (!(scale > 0)) throw ConfigError("intensity scale must be > 0", "/scale");
}

void LevyModel::set_comparability(double c26, double c27) {
  if (!(c26 > 0 && c26 <= 1)) throw ConfigError("C26 must lie in (0,1]", "/comparability/c26");
  if (!(c27 >= 1)) throw ConfigError("C27 must be >= 1", "/comparability/c27");
  c26_ = c26;
  c27_ = c27;
}

double LevyModel::c5() const { return std::max(c27_, 1.0 / c26_); }

double LevyModel::sphere_area() const {
  switch (dim_) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

double LevyModel::ball_volume(double r) const {
  switch (dim_) {
    case 1: return 2.0 * r;
    case 2: return kPi * r * r;
    default: return 4.0 / 3.0 * kPi * r * r * r;
  }
}

double LevyModel::nu_radial(double r) const {
  if (!(r > 0)) throw DomainError("nu is singular at the origin");
  double v = scale_ * profile_.g(r);
  if (flat_ && r >= flat_->r_lo && r <= flat_->r_hi) v = std::max(v, flat_->level);
  return v;
}

double LevyModel::log_nu_radial(double r) const {
  if (!(r > 0)) throw DomainError("nu is singular at the origin");
  double v = std::log(scale_) + profile_.log_g(r);
  if (flat_ && r >= flat_->r_lo && r <= flat_->r_hi) v = std::max(v, std::log(flat_->level));
  return v;
}

double LevyModel::nu(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("nu: point has wrong dimension");
  double r2 = 0;
  for (double v : x) r2 += v * v;
  return nu_radial(std::sqrt(r2));
}

double LevyModel::psi_closed(double k) const {
  k = std::abs(k);
  switch (closed_.kind) {
    case ClosedForm::Kind::stable:
      return scale_ / stable_constant(dim_, closed_.alpha) * std::pow(k, closed_.alpha);
    case ClosedForm::Kind::relativistic: {
      double m = closed_.mass, al = closed_.alpha;
      return std::pow(k * k + std::pow(m, 2.0 / al), al / 2.0) - m;
    }
    default:
      throw ConfigError("model has no closed-form symbol");
  }
}

double LevyModel::psi_levy(double k, double* err_out) const {
  k = std::abs(k);
  if (k == 0) {
    if (err_out) *err_out = 0;
    return 0.0;
  }
  const int d = dim_;
  const double rs = profile_.small_radius();
  const double G1 = profile_.small_coefficient();
  const double gam = profile_.small_exponent();
  const auto opt = tight();
  double total = 0, err = 0;

  // [0, rho]: exact power branch, substitution r = v^p flattens the r^{1-gamma} behaviour
  const double rho = std::min(rs, kOsc / k);
  const double p = 1.0 / (2.0 - gam);
  auto fa = [&](double v) {
    if (v <= 0) return G1 * p * k * k / (2.0 * d);
    double r = std::pow(v, p);
    double u = k * r;
    if (u < 1e-5) return G1 * p * k * k / (2.0 * d);
    return G1 * p * std::pow(r, -gam) * omega(d, u) / v;
  };
  auto qa = integrate_split(fa, 0.0, std::pow(rho, 2.0 - gam), 16, opt);
  total += qa.value;
  err += qa.error;

  // [rho, rs]: power branch with many oscillations
  if (rho < rs) {
    double plain = gam > 0 ? (std::pow(rho, -gam) - std::pow(rs, -gam)) / gam : std::log(rs / rho);
    auto pw = [gam](double r) { return std::pow(r, -1.0 - gam); };
    auto o1 = oscillatory_tail(d, pw, rho, k);
    auto o2 = oscillatory_tail(d, pw, rs, k);
    total += G1 * (plain - (o1.value - o2.value));
    err += G1 * (o1.error + o2.error);
  }

  auto F = [&](double r) { return profile_.g(r) * std::pow(r, d - 1); };

  // [rs, R]: non-oscillatory stretch in the log variable
  const double R = std::max(rs, kOsc / k);
  if (R > rs) {
    auto fc = [&](double t) {
      double r = std::exp(t);
      return F(r) * r * omega(d, k * r);
    };
    int pieces = std::min(200, 16 + 2 * static_cast<int>(std::log2(R / rs)));
    auto qc = integrate_split(fc, std::log(rs), std::log(R), pieces, opt);
    total += qc.value;
    err += qc.error;
  }

  // [R, inf): plain tail minus oscillatory tail
  auto qt = integrate_tail(F, R, opt);
  total += qt.value;
  err += qt.error;
  // |oscillatory part| <= plain tail since F >= 0 and |j_d| <= 1
  if (qt.value > 1e-17 * std::abs(total)) {
    auto qo = oscillatory_tail(d, F, R, k);
    total -= qo.value;
    err += qo.error;
  } else {
    err += qt.value;
  }

  double s = scale_ * sphere_area();
  if (err_out) *err_out = s * err;
  return s * total;
}

double LevyModel::psi_flat_correction(double k) const {
  if (!flat_) return 0.0;
  k = std::abs(k);
  if (k == 0) return 0.0;
  auto f = [&](double r) {
    double sig = flat_->level - scale_ * profile_.g(r);
    return std::max(sig, 0.0) * std::pow(r, dim_ - 1) * omega(dim_, k * r);
  };
  const double a = flat_->r_lo, b = flat_->r_hi;
  int pieces = 4 + static_cast<int>(k * (b - a) / kPi);
  if (pieces > 4000 && dim_ == 1) {
    // many oscillations: exact mass minus two integration-by-parts terms of \int sigma cos(kr)
    auto sig = [&](double r) { return std::max(flat_->level - scale_ * profile_.g(r), 0.0); };
    auto dsig = [&](double r) {
      double e = 1e-6 * r;
      return (sig(r + e) - sig(r - e)) / (2 * e);
    };
    double mass = integrate(sig, a, b, tight()).value;
    double c = (sig(b) * std::sin(k * b) - sig(a) * std::sin(k * a)) / k +
               (dsig(b) * std::cos(k * b) - dsig(a) * std::cos(k * a)) / (k * k);
    return sphere_area() * (mass - c);
  }
  QuadOptions opt = tight();
  if (pieces > 4000) opt.throw_on_failure = false;
  auto q = integrate_split(f, a, b, std::min(pieces, 4000), opt);
  return sphere_area() * q.value;
}

double LevyModel::psi_quadrature(double k, double* error) const {
  return a_ * k * k + psi_levy(k, error) + psi_flat_correction(k);
}

double LevyModel::psi(double k) const {
  k = std::abs(k);
  if (closed_.kind != ClosedForm::Kind::none) return a_ * k * k + psi_closed(k) + psi_flat_correction(k);
  return a_ * k * k + psi_levy(k, nullptr) + psi_flat_correction(k);
}

double LevyModel::psi(const std::vector<double>& xi) const {
  double r2 = 0;
  for (double v : xi) r2 += v * v;
  return psi(std::sqrt(r2));
}

double LevyModel::big_psi(double r) const {
  if (!(r > 0)) throw DomainError("big_psi needs r > 0");
  if (closed_.kind != ClosedForm::Kind::none && !flat_) return psi(r);
  const int n = 48;
  std::vector<double> v(n + 1);
  for (int i = 1; i <= n; ++i) v[i] = psi(r * i / n);
  int best = static_cast<int>(std::max_element(v.begin() + 1, v.end()) - v.begin());
  double m = v[best];
  if (best < n) {
    // golden-section refinement around an interior maximum
    double a = r * (best - 1) / n, b = r * (best + 1) / n;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = psi(c), fd = psi(d);
    for (int it = 0; it < 40 && b - a > 1e-10 * r; ++it) {
      if (fc > fd) {
        b = d; d = c; fd = fc; c = b - gr * (b - a); fc = psi(c);
      } else {
        a = c; c = d; fc = fd; d = a + gr * (b - a); fd = psi(d);
      }
    }
    m = std::max({m, fc, fd});
  }
  return m;
}

double LevyModel::tail_integral(double s) const {
  const int d = dim_;
  const double rs = profile_.small_radius();
  const double G1 = profile_.small_coefficient();
  const double gam = profile_.small_exponent();
  auto F = [&](double r) { return profile_.g(r) * std::pow(r, d - 1); };
  if (s < rs) {
    double head = gam > 0 ? G1 * (std::pow(s, -gam) - std::pow(rs, -gam)) / gam : G1 * std::log(rs / s);
    return head + integrate_tail(F, rs, tight()).value;
  }
  return integrate_tail(F, s, tight()).value;
}

double LevyModel::tail_mass(double s) const {
  if (!(s > 0)) throw DomainError("tail_mass needs s > 0");
  double m = scale_ * sphere_area() * tail_integral(s);
  if (flat_) {
    double lo = std::max(s, flat_->r_lo);
    if (lo < flat_->r_hi) {
      auto f = [&](double r) { return std::max(flat_->level - scale_ * profile_.g(r), 0.0) * std::pow(r, dim_ - 1); };
      m += sphere_area() * integrate(f, lo, flat_->r_hi, tight()).value;
    }
  }
  return m;
}

double LevyModel::second_moment_inside(double s) const {
  const int d = dim_;
  const double rs = profile_.small_radius();
  const double G1 = profile_.small_coefficient();
  const double gam = profile_.small_exponent();
  double m = std::min(s, rs);
  double v = G1 * std::pow(m, 2.0 - gam) / (2.0 - gam);
  if (s > rs) {
    auto f = [&](double t) {
      double r = std::exp(t);
      return profile_.g(r) * std::pow(r, d + 2);
    };
    int pieces = 8 + static_cast<int>(std::log2(s / rs));
    v += integrate_split(f, std::log(rs), std::log(s), pieces, tight()).value;
  }
  v *= scale_ * sphere_area();
  if (flat_) {
    double hi = std::min(s, flat_->r_hi);
    if (hi > flat_->r_lo) {
      auto f = [&](double r) {
        return std::max(flat_->level - scale_ * profile_.g(r), 0.0) * std::pow(r, dim_ + 1);
      };
      v += sphere_area() * integrate(f, flat_->r_lo, hi, tight()).value;
    }
  }
  return v;
}

double LevyModel::pruitt_H(double r) const {
  if (!(r > 0)) throw DomainError("pruitt_H needs r > 0");
  return a_ / (r * r) + second_moment_inside(r) / (r * r) + tail_mass(r);
}

namespace presets {

LevyModel stable(int d, double alpha, double diffusion) {
  LevyModel m(d, diffusion, Profile(Polynomial{alpha, alpha}, d), stable_constant(d, alpha));
  m.set_closed_form({ClosedForm::Kind::stable, alpha, 0.0});
  m.name = "stable";
  return m;
}

LevyModel relativistic(int d, double mass) {
  if (!(mass > 0)) throw ConfigError("relativistic mass must be > 0");
  const double order = (d + 1) / 2.0;
  const double pref = 2.0 * std::pow(mass / (2.0 * kPi), order);
  UserTable t;
  const int n = 4000;
  const double lo = std::log(1e-5 / mass), hi = std::log(600.0 / mass);
  for (int i = 0; i < n; ++i) {
    double r = std::exp(lo + (hi - lo) * i / (n - 1));
    t.radii.push_back(r);
    t.values.push_back(pref * std::cyl_bessel_k(order, mass * r) / std::pow(r, order));
  }
  LevyModel m(d, 0.0, Profile(t, d), 1.0);
  m.set_closed_form({ClosedForm::Kind::relativistic, 1.0, mass});
  m.name = "relativistic";
  return m;
}

LevyModel polynomial(int d, double gamma, double delta, double diffusion) {
  LevyModel m(d, diffusion, Profile(Polynomial{gamma, delta}, d));
  // a single power law on (0, inf) is a multiple of the stable intensity
  if (gamma == delta && gamma > 0 && gamma < 2) m.set_closed_form({ClosedForm::Kind::stable, gamma, 0.0});
  m.name = "polynomial";
  return m;
}

LevyModel subexponential(int d, double gamma, double c, double beta, double delta, double diffusion) {
  LevyModel m(d, diffusion, Profile(SubExponential{gamma, c, beta, delta}, d));
  m.name = "subexponential";
  return m;
}

LevyModel exponential(int d, double gamma, double c, double delta, double diffusion) {
  LevyModel m(d, diffusion, Profile(Exponential{gamma, c, delta}, d));
  m.name = "exponential";
  return m;
}

LevyModel superexponential(int d, double gamma, double c, double beta, double delta, double diffusion) {
  LevyModel m(d, diffusion, Profile(SuperExponential{gamma, c, beta, delta}, d));
  m.name = "superexponential";
  return m;
}

LevyModel diffusion_dominated(int d, double a, double jump_scale) {
  LevyModel m(d, a, Profile(Polynomial{1.0, 1.0}, d), jump_scale);
  // the jump part is a scaled Cauchy intensity
  m.set_closed_form({ClosedForm::Kind::stable, 1.0, 0.0});
  m.name = "diffusion";
  return m;
}

}  // namespace presets

PruittComparability pruitt_comparability(const LevyModel& m, double r_lo, double r_hi, int samples) {
  if (!(r_lo > 0 && r_hi >= r_lo)) throw DomainError("pruitt_comparability needs 0 < r_lo <= r_hi");
  PruittComparability out;
  int n = r_hi > r_lo ? std::max(samples, 2) : 1;
  for (int i = 0; i < n; ++i) {
    double r = n == 1 ? r_lo : r_lo * std::pow(r_hi / r_lo, double(i) / (n - 1));
    double q = m.big_psi(r) / m.pruitt_H(1.0 / r);
    out.radii.push_back(r);
    out.ratios.push_back(q);
  }
  out.c1 = *std::min_element(out.ratios.begin(), out.ratios.end());
  out.c2 = *std::max_element(out.ratios.begin(), out.ratios.end());
  return out;
}

ShellReport shell_constant(const LevyModel& m, const std::vector<double>& radii, double y_span, int y_samples) {
  if (m.dim() != 1) throw ConfigError("shell constant is implemented for d = 1");
  ShellReport out;
  auto mass = [&](double lo, double hi) {
    if (hi <= lo) return 0.0;
    auto f = [&](double w) { return m.nu_radial(std::abs(w)); };
    return integrate(f, lo, hi, tight()).value;
  };
  for (double r : radii) {
    if (r < 1) throw DomainError("shell constant needs r >= 1");
    double worst = 0;
    for (int i = 0; i < y_samples; ++i) {
      double y = r + 1 + y_span * i / std::max(1, y_samples - 1);
      double num = mass(std::max(y - r - 1, 0.125), y - r) + mass(y + r, y + r + 1);
      double den = mass(y - r, y - r + 1) + mass(y + r - 1, y + r);
      worst = std::max(worst, num / den);
    }
    out.radii.push_back(r);
    out.worst.push_back(worst);
    out.c8 = std::max(out.c8, worst);
  }
  out.c8 = std::max(out.c8, 1.0);
  return out;
}

}  // namespace levy
