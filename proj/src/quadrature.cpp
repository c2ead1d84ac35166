#include "levy/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "levy/errors.hpp"

namespace levy {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
using G10 = boost::math::quadrature::gauss<double, 10>;

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk21(const Integrand& f, double a, double b) {
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G10::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double k = f(c) * wk[0];
  double g = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    double s = f(c + h * x[i]) + f(c - h * x[i]);
    k += s * wk[i];
    if (i % 2 == 1) g += s * wg[i / 2];
  }
  double err = std::abs(k - g) * std::abs(h);
  if (!std::isfinite(k)) err = INFINITY;
  return {a, b, k * h, std::max(err, 50 * 2.2e-16 * std::abs(k * h))};
}

QuadResult run(const Integrand& f, std::vector<std::pair<double, double>> init, const QuadOptions& opt) {
  std::priority_queue<Piece> q;
  QuadResult r;
  double total = 0, err = 0;
  for (auto [a, b] : init) {
    Piece p = gk21(f, a, b);
    r.evals += 21;
    total += p.value;
    err += p.error;
    q.push(p);
  }
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && q.size() < opt.max_intervals) {
    Piece p = q.top();
    q.pop();
    double m = 0.5 * (p.a + p.b);
    if (m <= p.a || m >= p.b) {
      q.push(p);
      break;
    }
    Piece l = gk21(f, p.a, m), u = gk21(f, m, p.b);
    r.evals += 42;
    total += l.value + u.value - p.value;
    err += l.error + u.error - p.error;
    q.push(l);
    q.push(u);
  }
  // recompute sums to shed accumulated rounding from the running totals
  total = 0;
  err = 0;
  while (!q.empty()) {
    total += q.top().value;
    err += q.top().error;
    q.pop();
  }
  r.value = total;
  r.error = err;
  r.converged = std::isfinite(total) && err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  if (!r.converged && opt.throw_on_failure)
    throw QuadratureError("adaptive Gauss-Kronrod did not converge", err,
                          std::max(opt.abs_tol, opt.rel_tol * std::abs(total)));
  return r;
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt) {
  if (a == b) return {};
  if (b < a) {
    auto r = integrate(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  return run(f, {{a, b}}, opt);
}

QuadResult integrate_split(const Integrand& f, double a, double b, int pieces, const QuadOptions& opt) {
  if (a == b) return {};
  pieces = std::max(1, pieces);
  std::vector<std::pair<double, double>> init;
  double h = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) init.emplace_back(a + i * h, i + 1 == pieces ? b : a + (i + 1) * h);
  return run(f, init, opt);
}

QuadResult integrate_tail(const Integrand& f, double a, const QuadOptions& opt) {
  auto g = [&](double s) {
    if (s >= 1.0) return 0.0;
    double u = s / (1.0 - s);
    double r = a * std::exp(u);
    if (!std::isfinite(r)) return 0.0;
    double v = f(r) * r / ((1.0 - s) * (1.0 - s));
    return std::isfinite(v) ? v : 0.0;
  };
  // the log variable concentrates most mass near s = 0; pre-split for robustness
  return run(g, {{0.0, 0.25}, {0.25, 0.5}, {0.5, 0.75}, {0.75, 1.0}}, opt);
}

namespace {

template <class Rule>
Rule& ooura(double tol) {
  thread_local double cached_tol = -1;
  thread_local std::unique_ptr<Rule> rule;
  if (!rule || cached_tol != tol) {
    rule = std::make_unique<Rule>(tol, 8);
    cached_tol = tol;
  }
  return *rule;
}

}  // namespace

QuadResult fourier_cos_tail(const Integrand& f, double b, double k, double rel_tol) {
  auto& c = ooura<boost::math::quadrature::ooura_fourier_cos<double>>(rel_tol);
  auto& s = ooura<boost::math::quadrature::ooura_fourier_sin<double>>(rel_tol);
  auto shifted = [&](double t) { return f(b + t); };
  auto [ic, ec] = c.integrate(shifted, k);
  auto [is, es] = s.integrate(shifted, k);
  double cb = std::cos(k * b), sb = std::sin(k * b);
  QuadResult r;
  r.value = cb * ic - sb * is;
  r.error = std::abs(ec) + std::abs(es);
  return r;
}

QuadResult fourier_sin_tail(const Integrand& f, double b, double k, double rel_tol) {
  auto& c = ooura<boost::math::quadrature::ooura_fourier_cos<double>>(rel_tol);
  auto& s = ooura<boost::math::quadrature::ooura_fourier_sin<double>>(rel_tol);
  auto shifted = [&](double t) { return f(b + t); };
  auto [ic, ec] = c.integrate(shifted, k);
  auto [is, es] = s.integrate(shifted, k);
  double cb = std::cos(k * b), sb = std::sin(k * b);
  QuadResult r;
  r.value = sb * ic + cb * is;
  r.error = std::abs(ec) + std::abs(es);
  return r;
}

}  // namespace levy
