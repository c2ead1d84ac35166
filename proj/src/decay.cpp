#include "levy/decay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "levy/errors.hpp"

namespace levy {

const char* to_string(FitFamily f) {
  switch (f) {
    case FitFamily::power: return "power";
    case FitFamily::stretched_exp: return "stretched-exp";
    case FitFamily::exp: return "exp";
  }
  return "?";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::nu_driven: return "nu-driven";
    case Regime::lambda_driven: return "lambda-driven";
    case Regime::slower_than_nu: return "slower-than-nu";
    case Regime::confining_nu_over_v: return "confining-nu-over-V";
    case Regime::not_nu_driven: return "not-nu-driven";
    case Regime::inconclusive: return "inconclusive";
  }
  return "?";
}

void window_slice(const std::vector<double>& x, const std::vector<double>& phi, Window w, std::vector<double>& xs,
                  std::vector<double>& ps) {
  if (x.size() != phi.size()) throw ConfigError("abscissae and field have different lengths");
  if (!(w.hi > w.lo && w.lo > 0)) throw ConfigError("window must satisfy 0 < lo < hi");
  xs.clear();
  ps.clear();
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= w.lo - 1e-12 && x[i] <= w.hi + 1e-12) {
      xs.push_back(x[i]);
      ps.push_back(phi[i]);
    }
}

RatioStats tail_ratio(const std::vector<double>& x, const std::vector<double>& phi, const LevyModel& m, Window w,
                      double cap, double L) {
  if (L > 0 && (w.lo < 0.1 * L - 1e-9 || w.hi > 0.5 * L + 1e-9))
    throw ConfigError("analysis window touches the grid edge: it must lie inside [0.1 L, 0.5 L]");
  std::vector<double> xs, ps;
  window_slice(x, phi, w, xs, ps);
  if (xs.empty()) throw ConfigError("analysis window contains no grid nodes");
  std::vector<double> lr;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double a = std::abs(ps[i]);
    lr.push_back(a > 0 ? std::log(a) - m.log_nu_radial(xs[i]) : -INFINITY);
  }
  RatioStats s;
  s.cap = cap;
  s.nodes = static_cast<int>(lr.size());
  s.log_first = lr.front();
  s.log_last = lr.back();
  std::vector<double> sorted = lr;
  std::sort(sorted.begin(), sorted.end());
  s.log_min = sorted.front();
  s.log_max = sorted.back();
  s.log_median = sorted[sorted.size() / 2];
  if (sorted.size() % 2 == 0) s.log_median = 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  s.min = std::exp(s.log_min);
  s.max = std::exp(s.log_max);
  s.median = std::exp(s.log_median);
  s.comparable = std::isfinite(s.log_min) && s.log_max - s.log_min <= std::log(cap);
  return s;
}

namespace {

struct Lsq {
  Eigen::VectorXd coef;
  double ss_res = 0, ss_tot = 0;
};

// columns: basis functions evaluated at the samples
Lsq solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  Lsq r;
  r.coef = A.colPivHouseholderQr().solve(y);
  Eigen::VectorXd res = y - A * r.coef;
  r.ss_res = res.squaredNorm();
  r.ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  return r;
}

}  // namespace

FitResult fit_decay(const std::vector<double>& x, const std::vector<double>& phi, Window w, const FitSpec& spec) {
  std::vector<double> xs, ps;
  window_slice(x, phi, w, xs, ps);
  if (xs.size() < 3) throw ConfigError("fit window needs at least three nodes");
  for (double p : ps)
    if (!(p > 0)) throw DomainError("fit_decay needs a strictly positive field on the window");

  std::vector<std::size_t> pick;
  if (spec.log_spaced && static_cast<int>(xs.size()) > spec.samples) {
    const double a = std::log(xs.front()), b = std::log(xs.back());
    for (int i = 0; i < spec.samples; ++i) {
      double target = std::exp(a + (b - a) * i / (spec.samples - 1));
      auto it = std::lower_bound(xs.begin(), xs.end(), target);
      std::size_t j = it == xs.end() ? xs.size() - 1 : it - xs.begin();
      if (j > 0 && std::abs(xs[j - 1] - target) < std::abs(xs[j] - target)) --j;
      if (pick.empty() || pick.back() != j) pick.push_back(j);
    }
  } else {
    pick.resize(xs.size());
    std::iota(pick.begin(), pick.end(), 0);
  }
  const int n = static_cast<int>(pick.size());
  Eigen::VectorXd lx(n), X(n), y(n);
  for (int i = 0; i < n; ++i) {
    X(i) = xs[pick[i]];
    lx(i) = std::log(X(i));
    y(i) = std::log(ps[pick[i]]);
  }

  FitResult out;
  out.family = spec.family;
  out.n = n;

  // model: y = A - c f(x) - delta log x, with optional fixed delta moved to the left side
  auto fit_with = [&](const Eigen::VectorXd& f, Lsq& best, double& c, double& delta, double& A) {
    Eigen::VectorXd rhs = y;
    int cols = 1 + (f.size() ? 1 : 0) + (spec.delta ? 0 : 1);
    if (spec.delta) rhs += *spec.delta * lx;
    Eigen::MatrixXd M(n, cols);
    int k = 0;
    M.col(k++).setOnes();
    if (f.size()) M.col(k++) = -f;
    if (!spec.delta) M.col(k++) = -lx;
    best = solve(M, rhs);
    if (spec.delta) best.ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    A = best.coef(0);
    c = f.size() ? best.coef(1) : 0.0;
    delta = spec.delta ? *spec.delta : best.coef(cols - 1);
  };

  Lsq L;
  double c = 0, delta = 0, A = 0;
  switch (spec.family) {
    case FitFamily::power: {
      Eigen::MatrixXd M(n, 2);
      M.col(0).setOnes();
      M.col(1) = -lx;
      L = solve(M, y);
      A = L.coef(0);
      delta = L.coef(1);
      out.beta = 0;
      break;
    }
    case FitFamily::exp:
      fit_with(X, L, c, delta, A);
      out.beta = 1;
      break;
    case FitFamily::stretched_exp: {
      auto eval = [&](double beta, Lsq& l, double& cc, double& dd, double& aa) {
        Eigen::VectorXd f = X.array().pow(beta);
        fit_with(f, l, cc, dd, aa);
        return l.ss_res;
      };
      if (spec.beta) {
        eval(*spec.beta, L, c, delta, A);
        out.beta = *spec.beta;
      } else {
        // profile the residual over beta: coarse scan then golden section
        double bestb = 0.5, bestv = INFINITY;
        for (int i = 0; i <= 300; ++i) {
          double b = 0.02 + 2.98 * i / 300.0;
          Lsq l;
          double cc, dd, aa;
          double v = eval(b, l, cc, dd, aa);
          if (v < bestv) {
            bestv = v;
            bestb = b;
          }
        }
        double lo = std::max(0.01, bestb - 0.01), hi = bestb + 0.01;
        const double gr = (std::sqrt(5.0) - 1) / 2;
        double p = hi - gr * (hi - lo), q = lo + gr * (hi - lo);
        Lsq l;
        double cc, dd, aa;
        double fp = eval(p, l, cc, dd, aa), fq = eval(q, l, cc, dd, aa);
        for (int it = 0; it < 60; ++it) {
          if (fp < fq) {
            hi = q; q = p; fq = fp; p = hi - gr * (hi - lo); fp = eval(p, l, cc, dd, aa);
          } else {
            lo = p; p = q; fp = fq; q = lo + gr * (hi - lo); fq = eval(q, l, cc, dd, aa);
          }
        }
        out.beta = 0.5 * (lo + hi);
        eval(out.beta, L, c, delta, A);
      }
      break;
    }
  }
  out.amplitude = A;
  out.rate = c;
  out.power = delta;
  out.r2 = L.ss_tot > 0 ? 1.0 - L.ss_res / L.ss_tot : 1.0;
  out.rms = std::sqrt(L.ss_res / n);
  return out;
}

RegimeResult classify_regime(const LevyModel& m, const RegimeInput& in) {
  RegimeResult r;
  const double tol = in.tolerance;
  if (in.fit.r2 < 0.98) {
    r.regime = Regime::inconclusive;
    r.reason = "fit r^2 below 0.98";
    return r;
  }
  if (in.confining) {
    if (in.ratio && std::isfinite(in.ratio->log_min)) {
      r.regime = Regime::confining_nu_over_v;
      r.reason = "confining potential: phi0 compared against nu/V";
    } else {
      r.regime = Regime::inconclusive;
      r.reason = "confining potential needs a phi*V/nu ratio";
    }
    return r;
  }
  const auto& spec = m.profile().spec();
  const int d = m.dim();
  bool diverging = in.ratio && in.ratio->log_last - in.ratio->log_first > std::log(5.0);
  if (in.jump_paring_pass && !*in.jump_paring_pass && diverging) {
    r.regime = Regime::slower_than_nu;
    r.reason = "jump-paring audit failed and phi/nu grows across the window";
    return r;
  }
  if (auto* p = std::get_if<Polynomial>(&spec)) {
    double target = d + p->delta;
    bool ok = in.fit.family == FitFamily::power && std::abs(in.fit.power - target) <= tol * target;
    r.regime = ok ? Regime::nu_driven : Regime::not_nu_driven;
    r.reason = ok ? "fitted power matches the tail exponent of nu" : "fitted power differs from the tail exponent of nu";
    return r;
  }
  if (auto* p = std::get_if<SubExponential>(&spec)) {
    bool ok = in.fit.family == FitFamily::stretched_exp && std::abs(in.fit.rate - p->c) <= tol * p->c &&
              std::abs(in.fit.beta - p->beta) <= 0.1;
    r.regime = ok ? Regime::nu_driven : Regime::not_nu_driven;
    r.reason = ok ? "stretched-exponential fit matches nu" : "stretched-exponential fit differs from nu";
    return r;
  }
  double c = 0;
  if (auto* p = std::get_if<Exponential>(&spec)) c = p->c;
  if (auto* p = std::get_if<SuperExponential>(&spec)) {
    if (diverging) {
      r.regime = Regime::slower_than_nu;
      r.reason = "super-exponential nu: phi/nu grows across the window";
    } else {
      r.regime = Regime::inconclusive;
      r.candidates = {Regime::nu_driven, Regime::slower_than_nu};
      r.reason = "super-exponential nu without a diverging ratio";
    }
    (void)p;
    return r;
  }
  if (c > 0) {
    bool nu_rate = std::abs(in.fit.rate - c) <= tol * c;
    if (nu_rate) {
      r.regime = Regime::nu_driven;
      r.reason = "fitted exponential rate matches c";
      return r;
    }
    if (in.fit.rate < (1 - tol) * c) {
      if (in.sweep.size() >= 3) {
        auto sw = in.sweep;
        std::sort(sw.begin(), sw.end());
        bool mono = true;
        for (std::size_t i = 1; i < sw.size(); ++i) mono = mono && sw[i].second >= sw[i - 1].second - 1e-9;
        r.regime = mono ? Regime::lambda_driven : Regime::inconclusive;
        r.reason = mono ? "rate below c and increasing with |lambda0| across the sweep"
                        : "rate below c but not monotone in |lambda0|";
        if (!mono) r.candidates = {Regime::lambda_driven, Regime::not_nu_driven};
      } else {
        r.regime = Regime::not_nu_driven;
        r.reason = "rate below c; a depth sweep is needed to call it lambda-driven";
      }
      return r;
    }
    r.regime = Regime::inconclusive;
    r.candidates = {Regime::nu_driven, Regime::not_nu_driven};
    r.reason = "fitted rate above c beyond tolerance";
    return r;
  }
  r.regime = Regime::inconclusive;
  r.reason = "table profiles have no reference decay family";
  return r;
}

double measure_c6(const LevyModel& m, double r_max) {
  double c6 = 1.0;
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    double r = 1.0 + (std::max(r_max, 1.0) - 1.0) * i / n;
    c6 = std::max(c6, std::exp(m.log_nu_radial(r) - m.log_nu_radial(r + 1)));
  }
  return c6;
}

LowerBoundCertificate lower_bound_certificate(const LevyModel& m, const Potential& v, const std::vector<double>& x,
                                              const std::vector<double>& phi, double lambda, double delta,
                                              double survival, Window w) {
  if (!(delta > 0)) throw ConfigError("lower bound certificate needs delta > 0");
  if (!(survival > 0 && survival <= 1)) throw ConfigError("survival probability must lie in (0,1]");
  for (double p : phi)
    if (!(p > 0)) throw DomainError("lower bound certificate needs a strictly positive eigenfunction");
  LowerBoundCertificate c;
  c.radius = v.settle_radius(delta);
  if (!std::isfinite(c.radius)) throw ConfigError("potential never settles below delta");
  c.c5 = m.c5();
  c.c6 = measure_c6(m, w.hi + 1);
  c.survival = survival;
  double mass = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double a = x[i], b = x[i + 1];
    if (std::abs(a) <= c.radius && std::abs(b) <= c.radius) mass += 0.5 * (phi[i] + phi[i + 1]) * (b - a);
  }
  c.mass_inside = mass;
  const double e = std::abs(lambda) + delta;
  c.K = -std::expm1(-e) / (c.c5 * c.c5 * std::pow(c.c6, std::ceil(c.radius) + 1) * e) * survival * mass;
  c.pass = true;
  c.worst_margin = INFINITY;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double ax = std::abs(x[i]);
    if (ax < w.lo - 1e-12 || ax > w.hi + 1e-12) continue;
    double q = std::exp(std::log(phi[i]) - std::log(c.K) - m.log_nu_radial(ax));
    c.worst_margin = std::min(c.worst_margin, q);
    if (q < 1.0) c.pass = false;
  }
  return c;
}

OverlayReport hitting_overlay(const std::vector<HittingPoint>& pts, const LevyModel& m, double factor) {
  OverlayReport r;
  if (pts.empty()) throw ConfigError("overlay needs at least one point");
  double mn = INFINITY, mx = 0;
  for (auto& p : pts) {
    double q = p.value / m.nu_radial(std::abs(p.x));
    r.ratios.push_back(q);
    mn = std::min(mn, q);
    mx = std::max(mx, q);
  }
  r.c_hat = mx;
  r.spread = mn > 0 ? mx / mn : INFINITY;
  if (pts.size() < 2) r.stability = "n/a";
  else r.stability = r.spread <= factor ? "stable" : "unstable";
  return r;
}

DecayReport analyze_decay(const LevyModel& m, const std::vector<double>& x, const std::vector<double>& phi, Window w,
                          const FitSpec& fit, double lambda0, double eta0, double L, double cap, bool confining) {
  DecayReport r;
  r.window = w;
  r.ratio = tail_ratio(x, phi, m, w, cap, L);
  r.fit = fit_decay(x, phi, w, fit);
  RegimeInput in;
  in.lambda0 = lambda0;
  in.fit = r.fit;
  in.eta0 = eta0;
  in.ratio = r.ratio;
  in.confining = confining;
  r.regime = classify_regime(m, in);
  if (r.fit.r2 < 0.98) r.notes.push_back("fit r2 below 0.98: regime left inconclusive");
  if (!r.ratio.comparable) r.notes.push_back("phi/nu spread exceeds the comparability cap");
  return r;
}

}  // namespace levy
