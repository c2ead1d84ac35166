#include "levy/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>

#include "levy/density.hpp"
#include "levy/errors.hpp"
#include "levy/quadrature.hpp"

namespace levy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
double exponential(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

double norm(const double* x, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

double dist(const double* x, const double* c, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += (x[i] - c[i]) * (x[i] - c[i]);
  return std::sqrt(s);
}

struct Moments {
  double sum = 0, sum2 = 0;
  long n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  void merge(const Moments& o) {
    sum += o.sum;
    sum2 += o.sum2;
    n += o.n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double halfwidth() const {
    if (n < 2) return kInf;
    double m = mean();
    double var = std::max(0.0, (sum2 - n * m * m) / (n - 1));
    return 1.96 * std::sqrt(var / n);
  }
};

QuadOptions loose() {
  QuadOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-9;
  o.max_intervals = 4000;
  return o;
}

}  // namespace

const char* to_string(Sampler s) {
  return s == Sampler::exact_stable ? "exact-stable" : "compound-poisson-gaussian";
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LEVYTK_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

Rng chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return Rng(seq);
}

// ---------------------------------------------------------------------------------------------
// Jump sampler

JumpSampler::JumpSampler(const LevyModel& m, double eps) : dim_(m.dim()), eps_(eps) {
  if (!(eps > 0)) throw ConfigError("small-jump cutoff epsilon must be > 0", "/mc/epsilon");
  const int d = m.dim();
  const double area = m.sphere_area();
  auto f = [&](double r) { return area * m.nu_radial(r) * std::pow(r, d - 1); };

  // end of the tabulated range
  const Profile& p = m.profile();
  double R;
  if (p.power_tail()) {
    R = std::max(1e4, 1e4 * eps);
    tail_power_ = p.tail_exponent() - d;
  } else {
    R = std::max(2.0, 2 * eps);
    while (R < 1e6 && m.tail_mass(R) > 1e-15 * m.tail_mass(eps)) R *= 1.5;
  }
  std::vector<double> nodes;
  const int per_decade = 200;
  const int n = std::max(16, static_cast<int>(per_decade * std::log10(R / eps)));
  for (int i = 0; i <= n; ++i) nodes.push_back(std::log(eps) + (std::log(R) - std::log(eps)) * i / n);
  if (auto& fl = m.flattening()) {
    for (double b : {fl->r_lo, fl->r_hi})
      if (b > eps && b < R) nodes.push_back(std::log(b));
  }
  nodes.push_back(std::log(p.small_radius()));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::remove_if(nodes.begin(), nodes.end(),
                             [&](double v) { return v < std::log(eps) - 1e-14 || v > std::log(R) + 1e-14; }),
              nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              nodes.end());
  lr_ = nodes;
  cdf_.assign(lr_.size(), 0.0);
  for (std::size_t i = 1; i < lr_.size(); ++i) {
    double a = std::exp(lr_[i - 1]), b = std::exp(lr_[i]);
    cdf_[i] = cdf_[i - 1] + integrate(f, a, b, loose()).value;
  }
  tail_mass_ = m.tail_mass(R);
  if (!p.power_tail()) tail_power_ = 0;
  rate_ = cdf_.back() + tail_mass_;
  if (!(rate_ > 0) || !std::isfinite(rate_)) throw ConfigError("inverse-CDF table for the jump law could not be built");
}

double JumpSampler::radius(double u) const {
  double target = u * rate_;
  if (target >= cdf_.back()) {
    if (tail_power_ > 0) {
      double v = (target - cdf_.back()) / tail_mass_;  // in [0,1)
      return std::exp(lr_.back()) * std::pow(std::max(1.0 - v, 1e-300), -1.0 / tail_power_);
    }
    return std::exp(lr_.back());
  }
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  std::size_t i = std::max<std::size_t>(1, it - cdf_.begin()) - 1;
  i = std::min(i, cdf_.size() - 2);
  double w = (target - cdf_[i]) / (cdf_[i + 1] - cdf_[i]);
  return std::exp(lr_[i] + w * (lr_[i + 1] - lr_[i]));
}

void JumpSampler::sample(Rng& rng, double* out) const {
  double r = radius(uniform(rng));
  if (dim_ == 1) {
    out[0] = uniform(rng) < 0.5 ? -r : r;
    return;
  }
  double s = 0;
  for (int i = 0; i < dim_; ++i) {
    out[i] = normal(rng);
    s += out[i] * out[i];
  }
  s = std::sqrt(s);
  for (int i = 0; i < dim_; ++i) out[i] *= r / s;
}

// ---------------------------------------------------------------------------------------------
// Path simulator

PathSimulator::PathSimulator(const LevyModel& m, const PathConfig& cfg)
    : model_(&m), cfg_(cfg), jumps_(m, cfg.epsilon) {
  if (!(cfg.dt > 0)) throw ConfigError("dt must be > 0", "/mc/dt");
  if (!(cfg.horizon > 0)) throw ConfigError("horizon must be > 0", "/mc/horizon");
  if (cfg.n_paths < 1) throw ConfigError("n_paths must be >= 1", "/mc/paths");
  if (cfg.sampler == Sampler::compound_poisson_gaussian && cfg.dt * jumps_.rate() > 0.1 + 1e-12)
    throw ConfigError("dt * nu(B(0,eps)^c) exceeds 0.1: decrease dt or increase eps", "/mc/dt");
  sigma2_ = 2 * m.diffusion() + m.second_moment_inside(cfg.epsilon) / m.dim();
  if (cfg.sampler == Sampler::exact_stable) {
    if (m.closed_form().kind != ClosedForm::Kind::stable || m.flattening() || m.dim() != 1)
      throw ConfigError("exact-stable sampler needs a d = 1 stable model", "/mc/sampler");
    stable_scale_ = m.psi_closed(1.0);
  }
}

void PathSimulator::gaussian(Rng& rng, double* x, double dt) const {
  if (sigma2_ <= 0) return;
  double s = std::sqrt(sigma2_ * dt);
  for (int i = 0; i < dim(); ++i) x[i] += s * normal(rng);
}

void PathSimulator::stable_increment(Rng& rng, double* x, double dt) const {
  // Chambers-Mallows-Stuck for E exp(i xi S) = exp(-|xi|^alpha)
  const double al = model_->closed_form().alpha;
  double U = kPi * (uniform(rng) - 0.5), W = exponential(rng);
  double S;
  if (std::abs(al - 1.0) < 1e-12) {
    S = std::tan(U);
  } else {
    S = std::sin(al * U) / std::pow(std::cos(U), 1.0 / al) * std::pow(std::cos((1 - al) * U) / W, (1 - al) / al);
  }
  x[0] += std::pow(stable_scale_ * dt, 1.0 / al) * S;
  if (model_->diffusion() > 0) x[0] += std::sqrt(2 * model_->diffusion() * dt) * normal(rng);
}

double PathSimulator::hitting_time(Rng& rng, const double* x0, double r, double horizon) const {
  const int d = dim();
  double x[3] = {0, 0, 0};
  std::copy(x0, x0 + d, x);
  if (norm(x, d) <= r) return 0.0;
  double t = 0;
  if (cfg_.sampler == Sampler::exact_stable) {
    while (t < horizon) {
      double dt = std::min(cfg_.dt, horizon - t);
      stable_increment(rng, x, dt);
      t += dt;
      if (norm(x, d) <= r) return t;
    }
    return kInf;
  }
  const double rate = jumps_.rate();
  double next_jump = rate > 0 ? exponential(rng) / rate : kInf;
  double y[3];
  while (true) {
    const double t_end = std::min(next_jump, horizon);
    // Gaussian motion on [t, t_end]: one step when far from the ball, sub-steps of dt near it
    while (t < t_end && sigma2_ > 0) {
      double gap = norm(x, d) - r;
      double span = t_end - t;
      double step = gap > 6.0 * std::sqrt(sigma2_ * span) ? span : std::min(cfg_.dt, span);
      double before = norm(x, d);
      std::copy(x, x + d, y);
      gaussian(rng, x, step);
      t += step;
      double after = norm(x, d);
      if (after <= r) return t;
      if (d == 1 && y[0] * x[0] < 0) return t;  // passed through the interval
      double p = std::exp(-2.0 * (before - r) * (after - r) / (sigma2_ * step));
      if (uniform(rng) < p) return t;
    }
    t = t_end;
    if (next_jump >= horizon) return kInf;
    jumps_.sample(rng, y);
    for (int i = 0; i < d; ++i) x[i] += y[i];
    if (norm(x, d) <= r) return t;
    next_jump = t + exponential(rng) / rate;
  }
}

double PathSimulator::exit_time(Rng& rng, const double* c, double r, double horizon, double* exit_pos) const {
  const int d = dim();
  double x[3] = {0, 0, 0};
  std::copy(c, c + d, x);
  double t = 0;
  auto finish = [&](double tau) {
    if (exit_pos) std::copy(x, x + d, exit_pos);
    return tau;
  };
  if (cfg_.sampler == Sampler::exact_stable) {
    while (t < horizon) {
      double dt = std::min(cfg_.dt, horizon - t);
      stable_increment(rng, x, dt);
      t += dt;
      if (dist(x, c, d) >= r) return finish(t);
    }
    return kInf;
  }
  const double rate = jumps_.rate();
  double next_jump = rate > 0 ? exponential(rng) / rate : kInf;
  double y[3];
  while (true) {
    const double t_end = std::min(next_jump, horizon);
    while (t < t_end && sigma2_ > 0) {
      double gap = r - dist(x, c, d);
      double span = t_end - t;
      double step = gap > 6.0 * std::sqrt(sigma2_ * span) ? span : std::min(cfg_.dt, span);
      std::copy(x, x + d, y);
      gaussian(rng, x, step);
      t += step;
      double after = dist(x, c, d);
      if (after >= r) return finish(t);
      double p;
      if (d == 1) {
        double u0 = y[0] - c[0], u1 = x[0] - c[0];
        p = std::exp(-2.0 * (r - u0) * (r - u1) / (sigma2_ * step)) +
            std::exp(-2.0 * (r + u0) * (r + u1) / (sigma2_ * step));
      } else {
        p = std::exp(-2.0 * (r - dist(y, c, d)) * (r - after) / (sigma2_ * step));
      }
      if (uniform(rng) < p) {
        // exit through the boundary near the current point
        double a = std::max(after, 1e-300);
        for (int i = 0; i < d; ++i) x[i] = c[i] + (x[i] - c[i]) * r / a;
        return finish(t);
      }
    }
    t = t_end;
    if (next_jump >= horizon) return kInf;
    jumps_.sample(rng, y);
    for (int i = 0; i < d; ++i) x[i] += y[i];
    if (dist(x, c, d) >= r) return finish(t);
    next_jump = t + exponential(rng) / rate;
  }
}

void PathSimulator::advance(Rng& rng, double* x, double t_total, const std::function<double(double)>* V,
                            double* vint) const {
  const int d = dim();
  double acc = 0;
  double t = 0;
  if (cfg_.sampler == Sampler::exact_stable) {
    if (!V) {
      // stable increments are exact for any step length
      if (t_total > 0) stable_increment(rng, x, t_total);
      if (vint) *vint = 0;
      return;
    }
    double v0 = (*V)(x[0]);
    while (t < t_total) {
      double dt = std::min(cfg_.dt, t_total - t);
      stable_increment(rng, x, dt);
      t += dt;
      double v1 = (*V)(x[0]);
      acc += 0.5 * dt * (v0 + v1);
      v0 = v1;
    }
    if (vint) *vint = acc;
    return;
  }
  const double rate = jumps_.rate();
  double next_jump = rate > 0 ? exponential(rng) / rate : kInf;
  double y[3];
  auto potential = [&](const double* p) { return d == 1 ? (*V)(p[0]) : (*V)(norm(p, d)); };
  double v0 = V ? potential(x) : 0;
  while (true) {
    const double t_end = std::min(next_jump, t_total);
    if (!V) {
      // exact in law: one Gaussian increment per inter-jump interval
      gaussian(rng, x, t_end - t);
      t = t_end;
    } else {
      while (t < t_end) {
        double step = std::min(cfg_.dt, t_end - t);
        gaussian(rng, x, step);
        t += step;
        double v1 = potential(x);
        acc += 0.5 * step * (v0 + v1);
        v0 = v1;
      }
    }
    if (next_jump >= t_total) break;
    jumps_.sample(rng, y);
    for (int i = 0; i < d; ++i) x[i] += y[i];
    if (V) v0 = potential(x);
    next_jump = t + exponential(rng) / rate;
  }
  if (vint) *vint = acc;
}

PathSkeleton sample_path(const LevyModel& m, const PathConfig& cfg, const std::vector<double>& x0, long index) {
  if (static_cast<int>(x0.size()) != m.dim()) throw ConfigError("start point has the wrong dimension");
  PathSimulator sim(m, cfg);
  Rng rng = chunk_rng(cfg.seed, 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(index));
  PathSkeleton sk;
  sk.dim = m.dim();
  std::vector<double> x = x0;
  sk.t.push_back(0);
  sk.x.insert(sk.x.end(), x.begin(), x.end());
  double t = 0;
  while (t < cfg.horizon) {
    double step = std::min(cfg.dt, cfg.horizon - t);
    sim.advance(rng, x.data(), step);
    t += step;
    sk.t.push_back(t);
    sk.x.insert(sk.x.end(), x.begin(), x.end());
  }
  return sk;
}

std::vector<double> sample_increments(const LevyModel& m, const PathConfig& cfg, double t) {
  if (m.dim() != 1) throw ConfigError("sample_increments supports d = 1");
  PathSimulator sim(m, cfg);
  std::vector<double> out(cfg.n_paths);
  run_chunks<int>(cfg.n_paths, worker_count(cfg.workers), [&](long c, long b, long e, int&) {
    Rng rng = chunk_rng(cfg.seed, c);
    for (long i = b; i < e; ++i) {
      double x = 0;
      sim.advance(rng, &x, t);
      out[i] = x;
    }
  });
  return out;
}

double first_hitting(const LevyModel& m, const PathConfig& cfg, double x0, double r, long index) {
  PathSimulator sim(m, cfg);
  Rng rng = chunk_rng(cfg.seed, 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(index));
  double x[3] = {x0, 0, 0};
  return sim.hitting_time(rng, x, r, cfg.horizon);
}

std::vector<HittingEstimate> laplace_hitting(const LevyModel& m, const PathConfig& cfg, const std::vector<double>& xs,
                                             double r, const std::vector<double>& etas) {
  if (!(r > 0)) throw ConfigError("target radius must be > 0", "/mc/radius");
  for (double e : etas)
    if (!(e > 0)) throw ConfigError("eta must be > 0", "/mc/eta");
  std::vector<HittingEstimate> out;
  const int workers = worker_count(cfg.workers);
  for (double x0 : xs) {
    double horizon = cfg.horizon;
    for (int attempt = 0;; ++attempt) {
      PathConfig c = cfg;
      c.horizon = horizon;
      PathSimulator sim(m, c);
      struct Acc {
        std::vector<Moments> mom;
        long hits = 0, censored = 0;
      };
      auto parts = run_chunks<Acc>(cfg.n_paths, workers, [&](long ch, long b, long e, Acc& acc) {
        Rng rng = chunk_rng(cfg.seed, ch);
        acc.mom.assign(etas.size(), {});
        double x[3] = {x0, 0, 0};
        for (long i = b; i < e; ++i) {
          double tau = sim.hitting_time(rng, x, r, horizon);
          bool cens = !std::isfinite(tau);
          if (cens) ++acc.censored;
          else ++acc.hits;
          for (std::size_t k = 0; k < etas.size(); ++k) acc.mom[k].add(std::exp(-etas[k] * (cens ? horizon : tau)));
        }
      });
      std::vector<Moments> tot(etas.size());
      long hits = 0, censored = 0;
      for (auto& p : parts) {
        for (std::size_t k = 0; k < etas.size(); ++k) tot[k].merge(p.mom[k]);
        hits += p.hits;
        censored += p.censored;
      }
      std::vector<HittingEstimate> rows;
      bool resolved = true;
      for (std::size_t k = 0; k < etas.size(); ++k) {
        HittingEstimate h;
        h.x = x0;
        h.r = r;
        h.eta = etas[k];
        h.value = tot[k].mean();
        h.ci_halfwidth = tot[k].halfwidth();
        h.hit_fraction = static_cast<double>(hits) / cfg.n_paths;
        h.censored_fraction = static_cast<double>(censored) / cfg.n_paths;
        h.horizon = horizon;
        double contrib = h.censored_fraction * std::exp(-etas[k] * horizon);
        h.censoring_resolved = contrib <= 0.1 * h.ci_halfwidth || censored == 0;
        resolved = resolved && h.censoring_resolved;
        rows.push_back(h);
      }
      if (resolved || !cfg.auto_horizon || attempt >= cfg.max_doublings) {
        out.insert(out.end(), rows.begin(), rows.end());
        break;
      }
      horizon *= 2;
    }
  }
  return out;
}

ExitTimeEstimate exit_time_ball(const LevyModel& m, const PathConfig& cfg, double r, double survival_t) {
  if (!(r > 0)) throw ConfigError("ball radius must be > 0");
  PathSimulator sim(m, cfg);
  struct Acc {
    Moments tau, surv;
    long censored = 0;
  };
  auto parts = run_chunks<Acc>(cfg.n_paths, worker_count(cfg.workers), [&](long ch, long b, long e, Acc& acc) {
    Rng rng = chunk_rng(cfg.seed, ch);
    double c[3] = {0, 0, 0};
    for (long i = b; i < e; ++i) {
      double tau = sim.exit_time(rng, c, r, cfg.horizon);
      if (!std::isfinite(tau)) {
        ++acc.censored;
        tau = cfg.horizon;
      }
      acc.tau.add(tau);
      acc.surv.add(tau > survival_t ? 1.0 : 0.0);
    }
  });
  Moments tau, surv;
  long censored = 0;
  for (auto& p : parts) {
    tau.merge(p.tau);
    surv.merge(p.surv);
    censored += p.censored;
  }
  ExitTimeEstimate est;
  est.r = r;
  est.mean = tau.mean();
  est.ci_halfwidth = tau.halfwidth();
  est.survival_t = survival_t;
  est.survival = surv.mean();
  est.survival_ci = surv.halfwidth();
  est.censored_fraction = static_cast<double>(censored) / cfg.n_paths;
  return est;
}

MeanEstimate fk_expectation(const LevyModel& m, const PathConfig& cfg, const std::function<double(double)>& V,
                            const std::function<double(double)>& phi, double x, double t) {
  if (m.dim() != 1) throw ConfigError("fk_expectation supports d = 1");
  if (!(t > 0)) throw ConfigError("time must be > 0");
  PathSimulator sim(m, cfg);
  auto parts = run_chunks<Moments>(cfg.n_paths, worker_count(cfg.workers), [&](long ch, long b, long e, Moments& acc) {
    Rng rng = chunk_rng(cfg.seed, ch);
    for (long i = b; i < e; ++i) {
      double y = x, vint = 0;
      sim.advance(rng, &y, t, &V, &vint);
      acc.add(std::exp(-vint) * phi(y));
    }
  });
  Moments tot;
  for (auto& p : parts) tot.merge(p);
  return {tot.mean(), tot.halfwidth(), tot.n};
}

std::function<double(double)> periodic_interpolant(const Grid1D& g, std::vector<double> field) {
  if (static_cast<int>(field.size()) != g.N) throw ConfigError("field length does not match the grid");
  return [g, f = std::move(field)](double x) {
    double period = 2 * g.L;
    double u = std::fmod(x + g.L, period);
    if (u < 0) u += period;
    double pos = u / g.h();
    int i = static_cast<int>(std::floor(pos));
    double w = pos - i;
    i %= g.N;
    int j = (i + 1) % g.N;
    return (1 - w) * f[i] + w * f[j];
  };
}

// ---------------------------------------------------------------------------------------------
// Modified intensity and domination

LevyModel modified_model(const LevyModel& m, double s) {
  if (!(s >= 4)) throw ConfigError("modified intensity needs s >= 4");
  if (m.flattening()) throw ConfigError("model is already flattened");
  double level = 0;
  const int n = 512;
  for (int i = 0; i <= n; ++i) level = std::max(level, m.nu_radial(s / 4 + (s - s / 4) * i / n));
  LevyModel out = m;
  out.set_flattening({s / 4, s, level});
  out.name = m.name + "-flattened";
  return out;
}

SigmaMass sigma_mass(const LevyModel& m, double s) {
  LevyModel mod = modified_model(m, s);
  const auto& fl = *mod.flattening();
  const int d = m.dim();
  auto f = [&](double r) { return (fl.level - m.nu_radial(r)) * std::pow(r, d - 1); };
  SigmaMass sm;
  sm.total = m.sphere_area() * integrate(f, fl.r_lo, fl.r_hi, loose()).value;
  double lo = kInf;
  for (int i = 0; i <= 512; ++i) lo = std::min(lo, m.nu_radial(fl.r_lo + (fl.r_hi - fl.r_lo) * i / 512));
  sm.sup = fl.level - lo;
  return sm;
}

std::vector<double> potential_kernel(const LevyModel& m, double eta, const std::vector<double>& xs) {
  if (m.dim() != 1) throw ConfigError("potential kernel implemented for d = 1");
  if (!(eta > 0)) throw ConfigError("potential kernel needs eta > 0");
  std::function<double(double)> psi;
  std::optional<SymbolInterpolant> table;
  if (m.closed_form().kind != ClosedForm::Kind::none && !m.flattening()) {
    psi = [&](double k) { return m.psi(k); };
  } else {
    // beyond k = 1e3 the power-law extrapolation is accurate to ~1e-7 relative for the catalog
    table.emplace(m, 1e-4, 1e3, 1e-7, 1e-3);
    psi = [&](double k) { return (*table)(k); };
  }
  std::vector<double> out;
  for (double x : xs) {
    x = std::abs(x);
    if (x == 0) throw DomainError("potential kernel evaluated at x = 0");
    auto f = [&](double k) { return 1.0 / (eta + psi(k)); };
    out.push_back(fourier_cos_tail(f, 0.0, x, 1e-10).value / kPi);
  }
  return out;
}

double potential_kernel(const LevyModel& m, double eta, double x) { return potential_kernel(m, eta, std::vector{x}).front(); }

DominationReport domination_check(const LevyModel& m, double s, const std::vector<double>& t_set, double x_max,
                                  double tol) {
  if (m.dim() != 1) throw ConfigError("domination check implemented for d = 1");
  DominationReport rep;
  rep.s = s;
  rep.tol = tol;
  LevyModel mod = modified_model(m, s);
  rep.sigma = sigma_mass(m, s);
  const double S = rep.sigma.total;
  auto grid = linspace(-x_max, x_max, 801);
  DensityOptions opt;
  rep.pass = true;
  for (double t : t_set) {
    auto p1 = transition_density(m, t, grid, opt);
    auto p2 = transition_density(mod, t, grid, opt);
    DominationRow row;
    row.t = t;
    row.lower_margin = kInf;
    row.upper_margin = kInf;
    const double damp = std::exp(-S * t);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double lo = p2.values[i] - damp * p1.values[i];
      double hi = damp * p1.values[i] + t * rep.sigma.sup - p2.values[i];
      if (lo < row.lower_margin) {
        row.lower_margin = lo;
        row.worst_x_lower = grid[i];
      }
      if (hi < row.upper_margin) {
        row.upper_margin = hi;
        row.worst_x_upper = grid[i];
      }
    }
    row.pass = row.lower_margin >= -tol && row.upper_margin >= -tol;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  const double eta = 2 * S;
  rep.kernel_x = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  rep.kernel_g1 = potential_kernel(m, eta, rep.kernel_x);
  rep.kernel_g2 = potential_kernel(mod, eta - S, rep.kernel_x);
  rep.kernel_pass = true;
  for (std::size_t i = 0; i < rep.kernel_x.size(); ++i)
    if (rep.kernel_g1[i] > rep.kernel_g2[i] + 1e-9 * std::abs(rep.kernel_g2[i]) + 1e-12) rep.kernel_pass = false;
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Ikeda-Watanabe probe

IkedaWatanabeReport ikeda_watanabe_probe(const LevyModel& m, const PathConfig& cfg, double x0, double eta, double a,
                                         double b) {
  if (m.dim() != 1) throw ConfigError("Ikeda-Watanabe probe implemented for d = 1");
  if (!(b > a)) throw ConfigError("target interval must satisfy a < b");
  if (!(a > x0 + 1 || b < x0 - 1)) throw ConfigError("target must be disjoint from the closed ball around x0");
  if (!(eta > 0)) throw ConfigError("eta must be > 0");
  IkedaWatanabeReport rep;
  rep.x0 = x0;
  rep.eta = eta;
  rep.a = a;
  rep.b = b;

  PathSimulator sim(m, cfg);
  auto parts = run_chunks<Moments>(cfg.n_paths, worker_count(cfg.workers), [&](long ch, long bb, long e, Moments& acc) {
    Rng rng = chunk_rng(cfg.seed, ch);
    double c[3] = {x0, 0, 0}, y[3];
    for (long i = bb; i < e; ++i) {
      double tau = sim.exit_time(rng, c, 1.0, cfg.horizon, y);
      acc.add(std::isfinite(tau) && y[0] >= a && y[0] <= b ? std::exp(-eta * tau) : 0.0);
    }
  });
  Moments tot;
  for (auto& p : parts) tot.merge(p);
  rep.mc = {tot.mean(), tot.halfwidth(), tot.n};

  // killed propagator: u <- 1_D F^-1 e^{-dt psi} F u, G = \int e^{-eta t} u dt
  const double L = std::max(16.0, 4 * (std::abs(x0) + 1));
  Grid1D g(L, 1 << 12);
  const double h = g.h();
  auto sym = sample_symbol(m, g);
  const double dt = 1e-3;
  std::vector<double> mult(sym.size());
  for (std::size_t j = 0; j < sym.size(); ++j) mult[j] = std::exp(-dt * sym[j]);
  Hamiltonian H(sym, std::vector<double>(g.N, 0.0), g);
  std::vector<char> inside(g.N);
  for (int k = 0; k < g.N; ++k) inside[k] = std::abs(g.x(k) - x0) < 1.0;
  std::vector<double> u(g.N, 0.0), G(g.N, 0.0), tmp(g.N);
  u[g.index_of(x0)] = 1.0 / h;
  for (int k = 0; k < g.N; ++k) G[k] = 0.5 * dt * u[k];
  double t = 0;
  for (int step = 0; step < 2000000; ++step) {
    H.apply_multiplier(mult, u.data(), tmp.data());
    double mass = 0;
    for (int k = 0; k < g.N; ++k) {
      u[k] = inside[k] ? tmp[k] : 0.0;
      mass += u[k] * h;
    }
    t += dt;
    double w = std::exp(-eta * t) * dt;
    for (int k = 0; k < g.N; ++k) G[k] += w * u[k];
    if (std::exp(-eta * t) * mass < 1e-12) break;
  }
  double quad = 0;
  for (int k = 0; k < g.N; ++k) {
    if (!inside[k] || G[k] == 0) continue;
    double y = g.x(k);
    auto f = [&](double z) { return m.nu_radial(std::abs(z - y)); };
    quad += h * G[k] * integrate(f, a, b, loose()).value;
  }
  rep.quadrature = quad;
  rep.rel_diff = std::abs(rep.mc.value - quad) / std::max(quad, 1e-300);
  rep.pass = rep.rel_diff <= 0.10;
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Green function of a ball by occupation densities

GreenEstimate green_sup_mc(const LevyModel& m, const PathConfig& cfg, double s, double separation, int starts,
                           double bin) {
  if (m.dim() != 1) throw ConfigError("Green estimator implemented for d = 1");
  if (!(s > 0 && separation > 0 && bin > 0)) throw ConfigError("Green estimator needs s, separation, bin > 0");
  PathSimulator sim(m, cfg);
  const int nb = static_cast<int>(std::ceil(2 * s / bin));
  GreenEstimate out;
  out.s = s;
  out.separation = separation;
  for (int i = 0; i < starts; ++i) {
    const double x0 = -s + 2 * s * (i + 0.5) / starts;
    struct Acc {
      std::vector<Moments> bins;
    };
    auto parts = run_chunks<Acc>(cfg.n_paths, worker_count(cfg.workers), [&](long ch, long b, long e, Acc& acc) {
      Rng rng = chunk_rng(cfg.seed + 7919 * (i + 1), ch);
      acc.bins.assign(nb, {});
      std::vector<double> occ(nb);
      for (long p = b; p < e; ++p) {
        std::fill(occ.begin(), occ.end(), 0.0);
        double x = x0, t = 0;
        while (std::abs(x) < s && t < cfg.horizon) {
          int k = std::clamp(static_cast<int>((x + s) / bin), 0, nb - 1);
          occ[k] += cfg.dt;
          sim.advance(rng, &x, cfg.dt);
          t += cfg.dt;
        }
        for (int k = 0; k < nb; ++k) acc.bins[k].add(occ[k] / bin);
      }
    });
    std::vector<Moments> tot(nb);
    for (auto& p : parts)
      for (int k = 0; k < nb; ++k) tot[k].merge(p.bins[k]);
    for (int k = 0; k < nb; ++k) {
      double yc = -s + (k + 0.5) * bin;
      if (std::abs(yc - x0) < separation) continue;
      if (tot[k].mean() > out.sup) {
        out.sup = tot[k].mean();
        out.ci_halfwidth = tot[k].halfwidth();
        out.at_x = x0;
        out.at_y = yc;
      }
    }
  }
  return out;
}

}  // namespace levy
