#include "levy/suite.hpp"

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace levy {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

Check check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? Verdict::pass : Verdict::fail, std::move(detail)};
}

Check check(std::string name, Verdict v, std::string detail) { return {std::move(name), v, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SpectrumResult solve(const Hamiltonian& H, double tol = 1e-10) {
  SolverOptions o;
  o.tol = tol;
  return ground_state(H, o);
}

/// log(phi/nu) at every grid node of the window, positive side.
std::vector<double> log_ratio(const LevyModel& m, const Grid1D& g, const std::vector<double>& phi, Window w,
                              std::vector<double>* xs_out = nullptr) {
  std::vector<double> xs, ps;
  window_slice(g.nodes(), phi, w, xs, ps);
  std::vector<double> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(std::log(std::abs(ps[i])) - m.log_nu_radial(xs[i]));
  if (xs_out) *xs_out = xs;
  return out;
}

// ---------------------------------------------------------------- 1

CriterionResult polynomial_regime() {
  CriterionResult r;
  auto t0 = std::chrono::steady_clock::now();
  auto m = presets::stable(1, 1.0);
  Grid1D g(128, 1 << 15);
  Hamiltonian H(m, Potential(pot::Well{2, 1}), g);
  auto sr = solve(H);
  double elapsed = seconds_since(t0);
  auto x = g.nodes();
  const Window w{20, 60};
  auto ratio = tail_ratio(x, sr.vectors[0], m, w, 10.0, g.L);
  auto fit = fit_decay(x, sr.vectors[0], w, FitSpec{});
  double lam = sr.eigenvalues[0], res = sr.residuals[0];
  r.checks.push_back(check("lambda0 < 0", lam < 0, fmt("lambda0 = %.8f", lam)));
  r.checks.push_back(check("residual <= 1e-8", res <= 1e-8, fmt("residual = %.2e", res)));
  r.checks.push_back(check("phi0 x^2 spread <= 10 on [20,60]", ratio.max / ratio.min <= 10,
                           fmt("max/min = %.4f", ratio.max / ratio.min)));
  r.checks.push_back(check("power fit in [1.85, 2.15]", fit.power >= 1.85 && fit.power <= 2.15,
                           fmt("p = %.4f (r2 %.6f)", fit.power, fit.r2)));
  r.checks.push_back(check("runtime <= 120 s", elapsed <= 120, fmt("%.1f s", elapsed)));
  r.data = {{"lambda0", lam}, {"residual", res}, {"spread", ratio.max / ratio.min}, {"power", fit.power}};
  return r;
}

// ---------------------------------------------------------------- 2

CriterionResult subexponential_regime() {
  CriterionResult r;
  auto m = presets::subexponential(1, 1.0, 1.0, 0.5, 0.0);
  Grid1D g(96, 1 << 15);
  Hamiltonian H(m, Potential(pot::Well{3, 1}), g);
  auto sr = solve(H, 1e-9);
  auto x = g.nodes();
  const Window w{15, 40};
  FitSpec fs;
  fs.family = FitFamily::stretched_exp;
  fs.delta = 0.0;  // the model's power correction
  auto fit = fit_decay(x, sr.vectors[0], w, fs);
  auto ratio = tail_ratio(x, sr.vectors[0], m, w, 25.0, g.L);
  r.checks.push_back(check("c within 15%", std::abs(fit.rate - 1.0) <= 0.15, fmt("c = %.4f", fit.rate)));
  r.checks.push_back(check("beta within 0.1", std::abs(fit.beta - 0.5) <= 0.1, fmt("beta = %.4f", fit.beta)));
  r.checks.push_back(check("phi0/nu two-sided, cap 25", ratio.comparable,
                           fmt("min %.3g max %.3g (max/min %.3f)", ratio.min, ratio.max, ratio.max / ratio.min)));
  r.data = {{"lambda0", sr.eigenvalues[0]}, {"fit", to_json(fit)}, {"ratio", to_json(ratio)}};
  return r;
}

// ---------------------------------------------------------------- 3

CriterionResult exponential_transition() {
  CriterionResult r;
  auto m = presets::exponential(1, 1.0, 1.0, 2.0);
  Grid1D g(128, 1 << 15);
  auto sym = sample_symbol(m, g);
  auto x = g.nodes();
  std::vector<std::pair<double, double>> sweep;  // (|lambda0|, rate)
  Json rows = Json::array();
  for (double a : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    Hamiltonian H(sym, sample_potential(Potential(pot::Well{a, 1}), g), g);
    auto sr = solve(H, 1e-9);
    const auto& p = sr.vectors[0];
    // window ends where phi0 reaches the solver noise floor
    double mx = *std::max_element(p.begin(), p.end());
    double end = 6;
    for (int k = g.N / 2; k < g.N; ++k) {
      if (p[k] / mx < 1e-9) break;
      end = x[k];
    }
    Window w{6, std::min(end, 0.5 * g.L)};
    FitSpec fs;
    fs.family = FitFamily::exp;
    fs.delta = 2.0;
    auto fit = fit_decay(x, p, w, fs);
    sweep.emplace_back(-sr.eigenvalues[0], fit.rate);
    rows.push_back({{"a", a}, {"lambda0", sr.eigenvalues[0]}, {"window", {w.lo, w.hi}}, {"rate", fit.rate},
                    {"r2", fit.r2}});
  }
  std::sort(sweep.begin(), sweep.end());
  bool mono = true;
  for (std::size_t i = 1; i < sweep.size(); ++i) mono = mono && sweep[i].second >= sweep[i - 1].second;
  std::string rates;
  for (auto& [l, c] : sweep) rates += fmt("%s%.3f", rates.empty() ? "" : ", ", c);
  r.checks.push_back(check("rate non-decreasing in |lambda0|", mono, "rates " + rates));
  double deep = sweep.back().second, shallow = sweep.front().second;
  r.checks.push_back(check("deepest within 15% of c", std::abs(deep - 1.0) <= 0.15, fmt("%.4f", deep)));
  r.checks.push_back(check("shallowest <= 0.8 c", shallow <= 0.8, fmt("%.4f", shallow)));
  r.data = {{"sweep", rows}};
  return r;
}

// ---------------------------------------------------------------- 4

CriterionResult slower_than_nu() {
  CriterionResult r;
  Json rows = Json::array();
  auto one = [&](const std::string& label, const LevyModel& m) {
    Grid1D g(64, 1 << 14);
    Hamiltonian H(m, Potential(pot::Well{0.5, 1}), g);
    auto sr = solve(H, 1e-9);
    auto lr = log_ratio(m, g, sr.vectors[0], {10, 30});
    bool mono = true;
    for (std::size_t i = 1; i < lr.size(); ++i) mono = mono && lr[i] > lr[i - 1];
    double growth = std::exp(std::min(lr.back() - lr.front(), 700.0));
    r.checks.push_back(check(label + ": phi0/nu increasing", mono, fmt("%zu nodes", lr.size())));
    r.checks.push_back(check(label + ": growth >= 5", lr.back() - lr.front() >= std::log(5.0),
                             fmt("log growth %.3f", lr.back() - lr.front())));
    rows.push_back({{"model", label}, {"lambda0", sr.eigenvalues[0]}, {"log_growth", lr.back() - lr.front()},
                    {"growth", growth}, {"monotone", mono}});
  };
  auto ex = presets::exponential(1, 1.0, 1.0, 0.0);
  auto audit = jump_paring_audit(ex);
  r.checks.push_back(check("exponential delta=0 outside jump-paring", audit.verdict == Verdict::fail,
                           fmt("audit %s, last-doubling growth %.3f", to_string(audit.verdict),
                               audit.last_doubling_growth)));
  one("exponential", ex);
  one("superexponential", presets::superexponential(1, 1.0, 1.0, 2.0, 0.0));
  r.data = {{"models", rows}, {"jump_paring", to_json(audit)}};
  return r;
}

// ---------------------------------------------------------------- 5

CriterionResult parameter_functions() {
  CriterionResult r;
  auto t0 = std::chrono::steady_clock::now();
  Json data;
  const std::vector<double> s_set = {1, 2, 4, 8};
  auto k1_checks = [&](const std::string& label, const LevyModel& m) {
    std::vector<K1Result> ks;
    for (double s : s_set) ks.push_back(k1(m, s));
    bool stab = std::all_of(ks.begin(), ks.end(), [](auto& k) { return k.stabilized; });
    bool mono = true, tail = true;
    std::string vals, tails;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (i > 0 && ks[i].value > 1.01 * ks[i - 1].value) mono = false;
      double need = m.tail_mass(ks[i].s) / (2 * std::pow(m.c5(), 4));
      if (ks[i].value < need) tail = false;
      vals += fmt("%s%.4g", vals.empty() ? "" : ", ", ks[i].value);
      tails += fmt("%s%.3g", tails.empty() ? "" : ", ", ks[i].value / need);
    }
    r.checks.push_back(check(label + ": K1 non-increasing", !stab ? Verdict::inconclusive : mono ? Verdict::pass : Verdict::fail,
                             "K1 = " + vals));
    r.checks.push_back(check(label + ": tail domination", tail, "K1/(tail/(2 C5^4)) = " + tails));
    Json arr = Json::array();
    for (auto& k : ks) arr.push_back(to_json(k));
    data[label] = {{"k1", arr}};
  };
  auto poly = presets::polynomial(1, 1.0, 1.0);
  auto sub = presets::subexponential(1, 1.0, 1.0, 0.5, 0.0);
  k1_checks("polynomial", poly);
  k1_checks("subexponential", sub);

  auto sm = smallness_checks(sub, 4, {2, 4, 8, 16}, {});
  std::string prod;
  for (double p : sm.product) prod += fmt("%s%.4g", prod.empty() ? "" : ", ", p);
  r.checks.push_back(check("subexponential K1(4s) K2(s,4s,inf) strictly decreasing", sm.killing, prod));
  data["smallness"] = to_json(sm);

  auto ex = presets::exponential(1, 1.0, 1.0, 2.0);
  std::vector<double> q;
  std::string qs;
  for (double s : {1.0, 2.0, 4.0}) {
    q.push_back(k2(ex, s, 2 * s + 2, INFINITY) / std::exp(s));
    qs += fmt("%s%.4g", qs.empty() ? "" : ", ", q.back());
  }
  double lo = *std::min_element(q.begin(), q.end());
  bool bounded = std::isfinite(lo) && lo > 0 && lo >= 0.5 * q.front();
  r.checks.push_back(check("exponential K2(s,2s+2,inf)/e^s bounded below", bounded, qs));
  data["exp_k2_ratio"] = q;
  double elapsed = seconds_since(t0);
  r.checks.push_back(check("runtime <= 300 s", elapsed <= 300, fmt("%.1f s", elapsed)));
  r.data = data;
  return r;
}

// ---------------------------------------------------------------- 6

CriterionResult domination() {
  CriterionResult r;
  auto m = presets::polynomial(1, 1.0, 1.0);
  auto rep = domination_check(m, 4, {0.5, 1, 2}, 40.0, 1e-8);
  for (auto& row : rep.rows)
    r.checks.push_back(check(fmt("sandwich t=%g", row.t), row.pass,
                             fmt("lower margin %.3g at x=%g, upper margin %.3g at x=%g", row.lower_margin,
                                 row.worst_x_lower, row.upper_margin, row.worst_x_upper)));
  r.data = to_json(rep);
  return r;
}

// ---------------------------------------------------------------- 7

CriterionResult small_eigenvalue() {
  CriterionResult r;
  auto m = presets::stable(1, 1.0);
  Grid1D g(64, 1 << 13);
  Json data = Json::object();
  auto one = [&](const std::string& label, const Potential& v) {
    Hamiltonian H(m, v, g);
    auto sr = solve(H);
    auto rows = smallev_check(H, sr.eigenvalues[0], {1, 2, 4});
    for (auto& row : rows)
      r.checks.push_back(check(fmt("%s r=%g", label.c_str(), row.r), row.pass,
                               fmt("lambda0 %.5f <= bound %.5f (margin %.4f)", row.lambda0, row.bound, row.margin)));
    data[label] = to_json(rows);
  };
  one("well", Potential(pot::Well{2, 1}));
  one("poschl_teller", Potential(pot::PoschlTeller{3, 1}));
  r.data = data;
  return r;
}

// ---------------------------------------------------------------- 8

CriterionResult mc_consistency(const SuiteOptions& opt) {
  CriterionResult r;
  auto m = presets::stable(1, 1.0);
  Json data;

  // (a) folded histogram of X_1 against bin masses of the FFT density
  {
    PathConfig c;
    c.epsilon = 0.05;
    c.dt = 0.1 / (2 / (kPi * c.epsilon));
    c.n_paths = 1000000;
    c.seed = 42;
    c.workers = opt.workers;
    auto xs = sample_increments(m, c, 1.0);
    const int nb = 20;
    const double bw = 0.25;
    std::vector<double> cnt(nb);
    for (double v : xs) {
      double a = std::abs(v);
      if (a < nb * bw) cnt[static_cast<int>(a / bw)] += 1;
    }
    DensityOptions dopt;
    dopt.min_period = 4096;
    const int per = 64;
    auto grid = linspace(0, nb * bw, nb * per + 1);
    auto dens = transition_density(m, 1.0, grid, dopt);
    double worst = 0;
    std::vector<double> rel;
    for (int k = 0; k < nb; ++k) {
      double mass = 0;  // Simpson on the bin, doubled for |x|
      for (int i = 0; i < per; i += 2) {
        int j = k * per + i;
        mass += (dens.values[j] + 4 * dens.values[j + 1] + dens.values[j + 2]) * (grid[1] - grid[0]) / 3;
      }
      mass *= 2;
      double e = std::abs(cnt[k] / xs.size() - mass) / mass;
      rel.push_back(e);
      worst = std::max(worst, e);
    }
    r.checks.push_back(check("(a) density vs FFT <= 5%", worst <= 0.05, fmt("sup rel error %.4f", worst)));
    data["density_rel_error"] = rel;
  }

  // (b) Feynman-Kac eigen-relation
  {
    Potential v(pot::Well{2, 1});
    Grid1D g(32, 1 << 12);
    Hamiltonian H(m, v, g);
    auto sr = solve(H);
    auto phi = periodic_interpolant(g, sr.vectors[0]);
    std::function<double(double)> V = [&](double x) { return v(std::abs(x)); };
    PathConfig c;
    c.epsilon = 0.05;
    c.dt = 1e-3;
    c.n_paths = 100000;
    c.seed = 11;
    c.workers = opt.workers;
    Json rows = Json::array();
    for (double x : {0.0, 2.0}) {
      auto e = fk_expectation(m, c, V, phi, x, 1.0);
      double target = std::exp(-sr.eigenvalues[0]) * phi(x);
      double dev = (e.value - target) / e.ci_halfwidth;
      r.checks.push_back(check(fmt("(b) Feynman-Kac x=%g", x), std::abs(dev) <= 3,
                               fmt("%.5f +- %.5f vs %.5f (%.2f CI)", e.value, e.ci_halfwidth, target, dev)));
      rows.push_back({{"x", x}, {"mc", e.value}, {"ci", e.ci_halfwidth}, {"target", target}});
    }
    data["feynman_kac"] = rows;
  }

  // (c) hitting-time overlay
  {
    auto poly = presets::polynomial(1, 1.0, 1.0);
    PathConfig c;
    c.epsilon = 0.1;
    c.dt = 0.1 / (2 / c.epsilon);
    c.n_paths = 100000;
    c.horizon = 10;
    c.seed = 7;
    c.workers = opt.workers;
    auto est = laplace_hitting(poly, c, {8, 16, 32}, 1.0, {1.0});
    std::vector<HittingPoint> pts;
    Json rows = Json::array();
    for (auto& e : est) {
      pts.push_back({e.x, e.value, e.ci_halfwidth});
      rows.push_back(to_json(e));
    }
    auto o = hitting_overlay(pts, poly, 2.0);
    r.checks.push_back(check("(c) C-hat stable within x2", o.stability == "stable",
                             fmt("C-hat %.4f, spread %.3f", o.c_hat, o.spread)));
    data["hitting"] = rows;
    data["overlay"] = to_json(o);
  }
  r.data = data;
  return r;
}

// ---------------------------------------------------------------- 9

CriterionResult confining() {
  CriterionResult r;
  auto m = presets::stable(1, 1.0);
  Potential v(pot::ConfiningPower{1.0});
  Grid1D g(64, 1 << 15);
  Hamiltonian H(m, v, g);
  auto sr = solve(H, 1e-9);
  const Window w{10, 30};
  std::vector<double> xs;
  auto lr = log_ratio(m, g, sr.vectors[0], w, &xs);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    double q = lr[i] + std::log(v(xs[i]));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  auto fit = fit_decay(g.nodes(), sr.vectors[0], w, FitSpec{});
  r.checks.push_back(check("phi0 V/nu band <= 10", std::exp(hi - lo) <= 10, fmt("max/min %.4f", std::exp(hi - lo))));
  r.checks.push_back(check("power 4.0 +- 0.3", std::abs(fit.power - 4.0) <= 0.3, fmt("p = %.4f", fit.power)));
  r.data = {{"lambda0", sr.eigenvalues[0]}, {"band", std::exp(hi - lo)}, {"fit", to_json(fit)}};
  return r;
}

// ---------------------------------------------------------------- 10

CriterionResult properties(const SuiteOptions& opt) {
  CriterionResult r;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;

  // self-adjointness of the grid operator
  {
    auto m = presets::stable(1, 1.0);
    Grid1D g(32, 1 << 10);
    Hamiltonian H(m, Potential(pot::PoschlTeller{3, 1}), g);
    double worst = 0;
    for (int t = 0; t < 4; ++t) {
      std::vector<double> u(g.N), v(g.N);
      for (auto& a : u) a = nd(rng);
      for (auto& a : v) a = nd(rng);
      auto Hu = H.apply(u), Hv = H.apply(v);
      double a = 0, b = 0, n = 0;
      for (int i = 0; i < g.N; ++i) {
        a += Hu[i] * v[i];
        b += u[i] * Hv[i];
        n += std::abs(Hu[i] * v[i]);
      }
      worst = std::max(worst, std::abs(a - b) / n);
    }
    r.checks.push_back(check("self-adjointness", worst <= 1e-12, fmt("rel asymmetry %.2e", worst)));
  }

  // Psi and H: monotone, doubling
  {
    bool ok = true;
    std::string where;
    std::vector<LevyModel> models = {presets::stable(1, 1.0), presets::polynomial(1, 0.5, 1.5),
                                     presets::exponential(1, 1.0, 1.0, 2.0), presets::diffusion_dominated(1, 1.0)};
    for (auto& m : models)
      for (double x = 0.125; x <= 64; x *= 2) {
        double p1 = m.big_psi(x), p2 = m.big_psi(2 * x);
        double h1 = m.pruitt_H(x), h2 = m.pruitt_H(2 * x);
        bool good = p2 >= p1 * (1 - 1e-9) && p2 <= 4 * p1 * (1 + 1e-9) && h2 <= h1 * (1 + 1e-9) &&
                    h1 <= 4 * h2 * (1 + 1e-9);
        if (!good && ok) where = fmt("%s at r=%g", m.name.c_str(), x);
        ok = ok && good;
      }
    r.checks.push_back(check("Psi/H monotone and doubling", ok, ok ? "4 models, r in [1/8, 64]" : where));
  }

  // K2 >= 1
  {
    double lo = INFINITY;
    std::vector<LevyModel> models = {presets::polynomial(1, 1.0, 1.0), presets::subexponential(1, 1.0, 1.0, 0.5, 0.0),
                                     presets::exponential(1, 1.0, 1.0, 2.0)};
    for (auto& m : models)
      for (auto s : {std::array<double, 3>{1, 2, INFINITY}, {2, 4, INFINITY}, {1, 3, 10}, {4, 8, 64}})
        lo = std::min(lo, k2(m, s[0], s[1], s[2]));
    r.checks.push_back(check("K2 >= 1", lo >= 1, fmt("min %.4f", lo)));
  }

  // seed determinism, independent of worker count
  {
    auto m = presets::stable(1, 1.0);
    PathConfig c;
    c.epsilon = 0.1;
    c.dt = 0.01;
    c.n_paths = 3 * kChunk + 17;
    c.horizon = 5;
    c.seed = 99;
    c.workers = 1;
    auto a = laplace_hitting(m, c, {4, 8}, 1.0, {1.0, 0.5});
    c.workers = std::max(2, worker_count(opt.workers));
    auto b = laplace_hitting(m, c, {4, 8}, 1.0, {1.0, 0.5});
    c.seed = 100;
    auto d = laplace_hitting(m, c, {4, 8}, 1.0, {1.0, 0.5});
    bool same = a.size() == b.size(), differ = false;
    for (std::size_t i = 0; i < a.size() && same; ++i) {
      same = a[i].value == b[i].value && a[i].ci_halfwidth == b[i].ci_halfwidth;
      differ = differ || a[i].value != d[i].value;
    }
    r.checks.push_back(check("seed determinism", same && differ,
                             same ? (differ ? "identical across worker counts" : "different seeds agree") :
                                    "worker count changed the estimate"));
  }

  // ratio statistics are scale-equivariant
  {
    auto m = presets::polynomial(1, 1.0, 1.0);
    std::vector<double> x, phi, scaled;
    for (int i = 1; i <= 400; ++i) {
      double xi = 0.25 * i;
      x.push_back(xi);
      phi.push_back(std::pow(1 + xi, -2.0) * (1.5 + std::sin(xi)));
      scaled.push_back(7.5 * phi.back());
    }
    auto a = tail_ratio(x, phi, m, {10, 50});
    auto b = tail_ratio(x, scaled, m, {10, 50});
    double e = std::max({std::abs(b.min / a.min - 7.5), std::abs(b.max / a.max - 7.5),
                         std::abs(b.median / a.median - 7.5)}) / 7.5;
    bool ok = e <= 1e-12 && a.comparable == b.comparable;
    r.checks.push_back(check("ratio scale-equivariance", ok, fmt("rel deviation %.2e", e)));
  }

  // fit round trip on synthetic fields
  {
    std::vector<double> x;
    for (int i = 0; i < 4096; ++i) x.push_back(0.05 * i);
    auto field = [&](auto f) {
      std::vector<double> p;
      for (double xi : x) p.push_back(f(xi));
      return p;
    };
    FitSpec pw;
    auto fp = fit_decay(x, field([](double t) { return 3.0 * std::pow(t, -2.7); }), {10, 150}, pw);
    FitSpec se;
    se.family = FitFamily::stretched_exp;
    auto fs = fit_decay(x, field([](double t) { return 2.0 * std::exp(-1.3 * std::pow(t, 0.6)) * std::pow(t, -0.4); }),
                        {5, 150}, se);
    FitSpec ex;
    ex.family = FitFamily::exp;
    auto fe = fit_decay(x, field([](double t) { return std::exp(-0.7 * t) / (t * t); }), {5, 150}, ex);
    double err = std::max({std::abs(fp.power - 2.7), std::abs(fs.rate - 1.3), std::abs(fs.beta - 0.6),
                           std::abs(fs.power - 0.4), std::abs(fe.rate - 0.7), std::abs(fe.power - 2.0)});
    r.checks.push_back(check("fit round trip", err <= 1e-3, fmt("max parameter error %.2e", err)));
  }
  return r;
}

}  // namespace

std::vector<int> preset_criteria(const std::string& preset) {
  if (preset == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (preset == "polynomial") return {1, 6, 7, 8, 9, 10};
  throw ConfigError("unknown preset '" + preset + "' (all, polynomial)", "/preset");
}

std::string criterion_title(int id) {
  switch (id) {
    case 1: return "polynomial regime";
    case 2: return "sub-exponential regime";
    case 3: return "exponential phase transition";
    case 4: return "slower than nu outside jump-paring";
    case 5: return "parameter functions";
    case 6: return "domination sandwich";
    case 7: return "small eigenvalue bound";
    case 8: return "Monte Carlo vs spectral";
    case 9: return "confining potential";
    case 10: return "determinism and invariants";
  }
  throw ConfigError("unknown criterion " + std::to_string(id), "/criteria");
}

Verdict combine(const std::vector<Check>& checks) {
  if (checks.empty()) return Verdict::inconclusive;
  bool inconclusive = false;
  for (auto& c : checks) {
    if (c.verdict == Verdict::fail) return Verdict::fail;
    if (c.verdict == Verdict::inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::inconclusive : Verdict::pass;
}

CriterionResult run_criterion(int id, const SuiteOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  std::string title = criterion_title(id);
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = polynomial_regime(); break;
      case 2: r = subexponential_regime(); break;
      case 3: r = exponential_transition(); break;
      case 4: r = slower_than_nu(); break;
      case 5: r = parameter_functions(); break;
      case 6: r = domination(); break;
      case 7: r = small_eigenvalue(); break;
      case 8: r = mc_consistency(opt); break;
      case 9: r = confining(); break;
      case 10: r = properties(opt); break;
    }
    r.verdict = combine(r.checks);
  } catch (const InconclusiveError& e) {
    r.checks.push_back({"exception", Verdict::inconclusive, e.what()});
    r.verdict = Verdict::inconclusive;
  } catch (const std::exception& e) {
    r.checks.push_back({"exception", Verdict::fail, e.what()});
    r.verdict = Verdict::fail;
  }
  r.id = id;
  r.title = title;
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> run_suite(const std::vector<int>& ids, const SuiteOptions& opt,
                                       const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, opt));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::string v = to_string(r.verdict);
  std::transform(v.begin(), v.end(), v.begin(), ::toupper);
  std::string note;
  for (auto& c : r.checks)
    if (c.verdict != Verdict::pass) {
      note = c.name + ": " + c.detail;
      break;
    }
  if (note.empty() && !r.checks.empty()) note = r.checks.front().name + ": " + r.checks.front().detail;
  return fmt("AC%-2d %-12s %-36s %7.1f s  %s", r.id, v.c_str(), r.title.c_str(), r.seconds, note.c_str());
}

Json to_json(const CriterionResult& r) {
  Json checks = Json::array();
  for (auto& c : r.checks) checks.push_back({{"name", c.name}, {"verdict", to_string(c.verdict)}, {"detail", c.detail}});
  return {{"id", r.id}, {"title", r.title}, {"verdict", to_string(r.verdict)}, {"checks", checks},
          {"data", r.data}};
}

}  // namespace levy
