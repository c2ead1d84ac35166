#include "levy/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "levy/errors.hpp"
#include "levy/quadrature.hpp"

namespace levy {

namespace {

constexpr double kPi = std::numbers::pi;
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Modified Gram-Schmidt (two passes) of cols[from..] against everything before them.
// Columns that lose almost all their norm are dropped.
void orthonormalize(std::vector<Vec>& cols, std::size_t from) {
  std::vector<Vec> out(cols.begin(), cols.begin() + from);
  for (std::size_t c = from; c < cols.size(); ++c) {
    Vec v = cols[c];
    double n0 = norm(v);
    if (!(n0 > 0) || !std::isfinite(n0)) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) axpy(-dot(q, v), q, v);
    double n1 = norm(v);
    if (n1 < 1e-10 * n0 || !(n1 > 0)) continue;
    for (double& e : v) e /= n1;
    out.push_back(std::move(v));
  }
  cols = std::move(out);
}

}  // namespace

Grid1D::Grid1D(double half_width, int nodes) : L(half_width), N(nodes) {
  if (!(half_width > 0)) throw ConfigError("grid half-width L must be > 0", "/grid/L");
  if (nodes < 8 || !is_power_of_two(nodes)) throw ConfigError("grid node count N must be a power of two >= 8", "/grid/N");
}

double Grid1D::xi(int j) const { return kPi * j / L; }

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(N);
  for (int k = 0; k < N; ++k) x[k] = this->x(k);
  return x;
}

int Grid1D::index_of(double x) const {
  int k = static_cast<int>(std::lround((x + L) / h()));
  return std::clamp(k, 0, N - 1);
}

namespace {

double lagrange4(const double* f, double a, double b, double u) {
  double t = 3 * (u - a) / (b - a);
  return -(t - 1) * (t - 2) * (t - 3) / 6 * f[0] + t * (t - 2) * (t - 3) / 2 * f[1] -
         t * (t - 1) * (t - 3) / 2 * f[2] + t * (t - 1) * (t - 2) / 6 * f[3];
}

}  // namespace

SymbolInterpolant::SymbolInterpolant(const LevyModel& m, double k_lo, double k_hi, double tol, double min_width)
    : model_(&m) {
  if (!(k_lo > 0 && k_hi > k_lo)) throw ConfigError("symbol interpolant needs 0 < k_lo < k_hi");
  auto F = [&](double u) { return m.psi(std::exp(u)); };
  const double a = std::log(k_lo), b = std::log(k_hi);
  const int blocks = 16;
  double fa = F(a);
  for (int i = 0; i < blocks; ++i) {
    double lo = a + (b - a) * i / blocks, hi = i + 1 == blocks ? b : a + (b - a) * (i + 1) / blocks;
    double fb = F(hi);
    refine(lo, hi, fa, fb, tol, min_width);
    fa = fb;
  }
  const auto& f = pieces_.front();
  lo_slope_ = std::log(f.f[1] / f.f[0]) / ((f.b - f.a) / 3);
  const auto& g = pieces_.back();
  hi_slope_ = std::log(g.f[3] / g.f[2]) / ((g.b - g.a) / 3);
  if (g.direct) hi_slope_ = 1.0;
}

void SymbolInterpolant::refine(double a, double b, double fa, double fb, double tol, double min_width) {
  ++evaluations_;
  const double h = b - a;
  if (std::exp(b) - std::exp(a) < min_width) {
    pieces_.push_back({a, b, {fa, model_->psi(std::exp(a + h / 3)), model_->psi(std::exp(a + 2 * h / 3)), fb}, true});
    return;
  }
  Piece p{a, b, {fa, model_->psi(std::exp(a + h / 3)), model_->psi(std::exp(a + 2 * h / 3)), fb}, false};
  const double um = a + h / 2, fm = model_->psi(std::exp(um));
  evaluations_ += 3;
  if (std::abs(lagrange4(p.f, a, b, um) - fm) <= tol * std::abs(fm)) {
    pieces_.push_back(p);
    return;
  }
  refine(a, um, fa, fm, tol, min_width);
  refine(um, b, fm, fb, tol, min_width);
}

double SymbolInterpolant::operator()(double k) const {
  k = std::abs(k);
  if (k == 0) return 0.0;
  double u = std::log(k);
  const auto& first = pieces_.front();
  if (u < first.a) return first.f[0] * std::exp(lo_slope_ * (u - first.a));
  const auto& last = pieces_.back();
  if (u > last.b) return last.f[3] * std::exp(hi_slope_ * (u - last.b));
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), u, [](const Piece& p, double v) { return p.b < v; });
  if (it == pieces_.end()) it = pieces_.end() - 1;
  if (it->direct) return model_->psi(k);
  return lagrange4(it->f, it->a, it->b, u);
}

std::vector<double> sample_symbol(const LevyModel& m, const Grid1D& g) {
  if (m.dim() != 1) throw ConfigError("the eigensolver supports d = 1 only", "/dimension");
  const int M = g.N / 2;
  std::vector<double> s(M + 1);
  const bool closed = m.closed_form().kind != ClosedForm::Kind::none && !m.flattening();
  if (closed || M < 512) {
    for (int j = 0; j <= M; ++j) s[j] = m.psi(g.xi(j));
    return s;
  }
  // pieces narrower than a few grid frequencies are evaluated directly at the nodes they cover
  SymbolInterpolant I(m, g.xi(1), g.xi(M), 1e-10, 4 * g.xi(1));
  s[0] = 0.0;
  for (int j = 1; j < M; ++j) s[j] = I(g.xi(j));
  s[M] = m.psi(g.xi(M));
  return s;
}

std::vector<double> sample_potential(const Potential& v, const Grid1D& g) {
  std::vector<double> V(g.N);
  const double h = g.h();
  for (int k = 0; k < g.N; ++k) {
    double x = std::abs(g.x(k));
    double val = x < h ? v(h) : v(x);
    if (!std::isfinite(val))
      throw DomainError("potential is not finite at x = " + std::to_string(g.x(k)) + " (unclipped singularity)");
    V[k] = val;
  }
  return V;
}

Hamiltonian::Hamiltonian(const LevyModel& m, const Potential& v, const Grid1D& g)
    : Hamiltonian(sample_symbol(m, g), sample_potential(v, g), g) {}

Hamiltonian::Hamiltonian(std::vector<double> symbol, std::vector<double> potential, const Grid1D& g)
    : grid_(g), symbol_(std::move(symbol)), V_(std::move(potential)), fft_(g.N), spec_(g.N / 2 + 1) {
  if (static_cast<int>(symbol_.size()) != g.N / 2 + 1) throw ConfigError("symbol length must be N/2 + 1");
  if (static_cast<int>(V_.size()) != g.N) throw ConfigError("potential length must be N");
  for (double v : V_)
    if (!std::isfinite(v)) throw DomainError("potential contains NaN or infinite values on the grid");
  for (double s : symbol_)
    if (!std::isfinite(s)) throw DomainError("symbol contains NaN or infinite values on the grid");
}

void Hamiltonian::apply_multiplier(const std::vector<double>& mult, const double* in, double* out) const {
  fft_.forward(in, spec_.data());
  const double inv = 1.0 / grid_.N;
  for (std::size_t j = 0; j < spec_.size(); ++j) spec_[j] *= mult[j] * inv;
  fft_.inverse(spec_.data(), out);
}

void Hamiltonian::apply_free(const double* in, double* out) const { apply_multiplier(symbol_, in, out); }

void Hamiltonian::apply(const double* in, double* out) const {
  apply_free(in, out);
  for (int k = 0; k < grid_.N; ++k) out[k] += V_[k] * in[k];
}

std::vector<double> Hamiltonian::apply(const std::vector<double>& in) const {
  std::vector<double> out(in.size());
  apply(in.data(), out.data());
  return out;
}

void Hamiltonian::split_step(double dt, double* f) const {
  for (int k = 0; k < grid_.N; ++k) f[k] *= std::exp(-0.5 * dt * V_[k]);
  fft_.forward(f, spec_.data());
  const double inv = 1.0 / grid_.N;
  for (std::size_t j = 0; j < spec_.size(); ++j) spec_[j] *= std::exp(-dt * symbol_[j]) * inv;
  fft_.inverse(spec_.data(), f);
  for (int k = 0; k < grid_.N; ++k) f[k] *= std::exp(-0.5 * dt * V_[k]);
}

BlockResult lobpcg(int n, const LinearOp& A, const LinearOp& T, std::vector<Vec> X, int wanted, double tol,
                   int max_iter, const std::vector<char>* mask) {
  auto project = [&](Vec& v) {
    if (mask)
      for (int i = 0; i < n; ++i)
        if (!(*mask)[i]) v[i] = 0.0;
  };
  auto applyA = [&](const Vec& v) {
    Vec out(n);
    A(v.data(), out.data());
    project(out);
    return out;
  };
  const int b = static_cast<int>(X.size());
  if (b < wanted || wanted < 1) throw ConfigError("block size must be >= number of wanted eigenpairs >= 1");

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  for (auto& x : X) project(x);
  orthonormalize(X, 0);
  while (static_cast<int>(X.size()) < b) {
    Vec r(n);
    for (auto& e : r) e = nd(rng);
    project(r);
    X.push_back(r);
    orthonormalize(X, X.size() - 1);
  }

  auto rayleigh_ritz = [&](std::vector<Vec>& S, std::vector<Vec>& AS, int keep, Eigen::MatrixXd& C, Eigen::VectorXd& lam) {
    const int m = static_cast<int>(S.size());
    Eigen::MatrixXd G(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) G(i, j) = G(j, i) = 0.5 * (dot(S[i], AS[j]) + dot(S[j], AS[i]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    C = es.eigenvectors().leftCols(keep);
    lam = es.eigenvalues().head(keep);
  };
  auto combine = [&](const std::vector<Vec>& S, const Eigen::MatrixXd& C, int row0) {
    std::vector<Vec> out(C.cols(), Vec(n, 0.0));
    for (int c = 0; c < C.cols(); ++c)
      for (int r = row0; r < static_cast<int>(S.size()); ++r) axpy(C(r, c), S[r], out[c]);
    return out;
  };

  std::vector<Vec> AX;
  for (auto& x : X) AX.push_back(applyA(x));
  Eigen::MatrixXd C;
  Eigen::VectorXd lam;
  rayleigh_ritz(X, AX, b, C, lam);
  X = combine(X, C, 0);
  AX = combine(AX, C, 0);
  std::vector<Vec> P;

  BlockResult res;
  for (int it = 0; it <= max_iter; ++it) {
    res.iterations = it;
    if (it % 25 == 24) {
      // refresh products to stop drift from repeated recombination
      orthonormalize(X, 0);
      AX.clear();
      for (auto& x : X) AX.push_back(applyA(x));
      rayleigh_ritz(X, AX, static_cast<int>(X.size()), C, lam);
      X = combine(X, C, 0);
      AX = combine(AX, C, 0);
    }
    std::vector<Vec> R(X.size());
    res.residuals.assign(X.size(), 0.0);
    bool done = true;
    for (std::size_t i = 0; i < X.size(); ++i) {
      R[i] = AX[i];
      axpy(-lam(i), X[i], R[i]);
      res.residuals[i] = norm(R[i]);
      if (static_cast<int>(i) < wanted && res.residuals[i] > tol) done = false;
    }
    if (done || it == max_iter) {
      res.converged = done;
      break;
    }
    std::vector<Vec> S = X;
    const std::size_t nx = S.size();
    for (std::size_t i = 0; i < R.size(); ++i) {
      if (static_cast<int>(i) < wanted && res.residuals[i] <= 0.1 * tol) continue;
      Vec w(n);
      T(R[i].data(), w.data());
      project(w);
      S.push_back(std::move(w));
    }
    for (auto& p : P) S.push_back(p);
    orthonormalize(S, nx);
    std::vector<Vec> AS(AX.begin(), AX.end());
    for (std::size_t i = nx; i < S.size(); ++i) AS.push_back(applyA(S[i]));
    rayleigh_ritz(S, AS, b, C, lam);
    std::vector<Vec> Xn = combine(S, C, 0), AXn = combine(AS, C, 0);
    P = combine(S, C, static_cast<int>(nx));
    X = std::move(Xn);
    AX = std::move(AXn);
  }
  // final clean residuals from fresh products
  AX.clear();
  for (auto& x : X) AX.push_back(applyA(x));
  res.values.assign(lam.data(), lam.data() + lam.size());
  res.residuals.clear();
  bool ok = true;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double l = dot(X[i], AX[i]) / dot(X[i], X[i]);
    res.values[i] = l;
    Vec r = AX[i];
    axpy(-l, X[i], r);
    res.residuals.push_back(norm(r));
    if (static_cast<int>(i) < wanted && res.residuals.back() > tol) ok = false;
  }
  res.converged = ok;
  res.vectors = std::move(X);
  return res;
}

namespace {

SpectrumResult solve_lowest(const Hamiltonian& H, int k, const SolverOptions& opt) {
  const Grid1D& g = H.grid();
  const int n = g.N;
  const double h = g.h();

  // imaginary-time start from a Gaussian at the bottom of V
  int kmin = static_cast<int>(std::min_element(H.potential().begin(), H.potential().end()) - H.potential().begin());
  double x0 = g.x(kmin);
  if (std::abs(x0) < 2 * h || H.potential()[kmin] == H.potential()[g.index_of(0.0)]) x0 = 0.0;
  Vec phi(n);
  for (int i = 0; i < n; ++i) {
    double d = g.x(i) - x0;
    phi[i] = std::exp(-0.5 * d * d);
  }
  for (int s = 0; s < opt.imaginary_steps; ++s) {
    H.split_step(opt.dt, phi.data());
    double nn = norm(phi);
    for (double& e : phi) e /= nn;
  }
  Vec Hphi = H.apply(phi);
  double lam_est = dot(phi, Hphi);

  std::vector<Vec> X0{phi};
  const int b = k + std::max(0, opt.guard);
  for (int j = 1; static_cast<int>(X0.size()) < b; ++j) {
    Vec v(n);
    for (int i = 0; i < n; ++i) {
      double d = (g.x(i) - x0) / 2.0;
      v[i] = phi[i] * std::pow(d, j) + 1e-3 * std::exp(-0.05 * d * d) * std::pow(d, j % 2);
    }
    X0.push_back(v);
  }

  double sigma = std::max(std::abs(lam_est), std::max(H.symbol()[1], 1e-3));
  std::vector<double> pre(H.symbol().size());
  for (std::size_t j = 0; j < pre.size(); ++j) pre[j] = 1.0 / (H.symbol()[j] + sigma);
  // large positive V is damped by a diagonal scaling on both sides: T = S F^-1 (psi + sigma)^-1 F S
  Vec S(n, 1.0);
  bool scaled = false;
  for (int i = 0; i < n; ++i) {
    double v = H.potential()[i];
    if (v > sigma) {
      S[i] = 1.0 / std::sqrt(1.0 + (v - sigma) / sigma);
      scaled = true;
    }
  }
  Vec tmp(n);
  LinearOp A = [&](const double* in, double* out) { H.apply(in, out); };
  LinearOp T = [&](const double* in, double* out) {
    if (!scaled) {
      H.apply_multiplier(pre, in, out);
      return;
    }
    for (int i = 0; i < n; ++i) tmp[i] = S[i] * in[i];
    H.apply_multiplier(pre, tmp.data(), out);
    for (int i = 0; i < n; ++i) out[i] *= S[i];
  };
  auto br = lobpcg(n, A, T, X0, k, opt.tol, opt.max_iter);

  SpectrumResult out;
  out.grid = g;
  out.iterations = br.iterations;
  out.method = "imaginary-time splitting start + preconditioned block iteration (LOBPCG)";
  out.converged = br.converged;
  out.floor = std::max(10 * opt.tol, 0.01 * H.symbol()[1]);
  const double scale = 1.0 / std::sqrt(h);
  for (int i = 0; i < k; ++i) {
    Vec v = br.vectors[i];
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    if (i == 0 && s < 0) for (double& e : v) e = -e;
    if (i > 0) {
      // deterministic sign: first component of significant size is positive
      double mx = 0;
      for (double e : v) mx = std::max(mx, std::abs(e));
      for (double e : v)
        if (std::abs(e) > 1e-3 * mx) {
          if (e < 0) for (double& f : v) f = -f;
          break;
        }
    }
    for (double& e : v) e *= scale;
    out.eigenvalues.push_back(br.values[i]);
    out.vectors.push_back(std::move(v));
    out.residuals.push_back(br.residuals[i]);
  }
  out.min_phi0 = *std::min_element(out.vectors[0].begin(), out.vectors[0].end());
  out.no_discrete_ground_state = out.eigenvalues[0] > -out.floor;
  return out;
}

}  // namespace

SpectrumResult ground_state(const Hamiltonian& H, const SolverOptions& opt) { return solve_lowest(H, 1, opt); }

SpectrumResult excited_states(const Hamiltonian& H, int k, const SolverOptions& opt) {
  if (k < 1) throw ConfigError("number of eigenpairs k must be >= 1", "/k");
  SpectrumResult r = solve_lowest(H, k, opt);
  std::size_t keep = 0;
  while (keep < r.eigenvalues.size() && r.eigenvalues[keep] <= -r.floor) ++keep;
  if (keep < static_cast<std::size_t>(k)) {
    r.fewer_than_requested = true;
    std::size_t cut = std::max<std::size_t>(keep, 1);
    r.eigenvalues.resize(cut);
    r.vectors.resize(cut);
    r.residuals.resize(cut);
  }
  return r;
}

double dirichlet_mu(const Hamiltonian& H, double r, double tol) {
  const Grid1D& g = H.grid();
  if (!(r > 0)) throw DomainError("Dirichlet radius must be > 0");
  if (r >= g.L / 4) throw ConfigError("Dirichlet radius must satisfy r < L/4 to keep wrap-around negligible");
  const int n = g.N;
  std::vector<char> mask(n);
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    mask[i] = std::abs(g.x(i)) < r;
    inside += mask[i];
  }
  if (inside < 4) throw ConfigError("Dirichlet ball contains fewer than 4 grid nodes; refine the grid");
  Vec x0(n, 0.0), x1(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (mask[i]) {
      x0[i] = std::cos(0.5 * kPi * g.x(i) / r);
      x1[i] = std::sin(kPi * g.x(i) / r);
    }
  double sigma = std::max(1e-3, H.symbol()[std::min<int>(H.symbol().size() - 1, static_cast<int>(g.L / r))]);
  std::vector<double> pre(H.symbol().size());
  for (std::size_t j = 0; j < pre.size(); ++j) pre[j] = 1.0 / (H.symbol()[j] + sigma);
  LinearOp A = [&](const double* in, double* out) { H.apply_free(in, out); };
  LinearOp T = [&](const double* in, double* out) { H.apply_multiplier(pre, in, out); };
  auto br = lobpcg(n, A, T, {x0, x1}, 1, tol, 4000, &mask);
  if (!br.converged)
    throw QuadratureError("Dirichlet eigenvalue iteration did not converge", br.residuals[0], tol);
  return br.values[0];
}

double dirichlet_mu(const LevyModel& m, double r, const Grid1D& g, double tol) {
  Hamiltonian H(m, Potential(pot::Free{}), g);
  return dirichlet_mu(H, r, tol);
}

std::vector<SmallevRow> smallev_check(const Hamiltonian& H, double lambda0, const std::vector<double>& r_set) {
  std::vector<SmallevRow> rows;
  const Grid1D& g = H.grid();
  for (double r : r_set) {
    SmallevRow row;
    row.r = r;
    row.lambda0 = lambda0;
    double sup_plus = 0, inf_minus = INFINITY;
    for (int i = 0; i < g.N; ++i) {
      if (std::abs(g.x(i)) > 2 * r + 1e-12) continue;
      double v = H.potential()[i];
      sup_plus = std::max(sup_plus, std::max(v, 0.0));
      inf_minus = std::min(inf_minus, std::max(-v, 0.0));
    }
    row.sup_vplus = sup_plus;
    row.inf_vminus = std::isfinite(inf_minus) ? inf_minus : 0.0;
    row.mu = dirichlet_mu(H, r);
    row.bound = row.sup_vplus - row.inf_vminus + row.mu;
    row.margin = row.bound - lambda0;
    row.pass = lambda0 <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

namespace {

// log-log interpolated symbol, cheap to evaluate many times
class SymbolTable {
 public:
  explicit SymbolTable(const LevyModel& m) {
    const double lo = -5, hi = 7;
    const int n = 1201;
    for (int i = 0; i < n; ++i) {
      double lk = std::log(10.0) * (lo + (hi - lo) * i / (n - 1));
      lk_.push_back(lk);
      lp_.push_back(std::log(std::max(m.psi(std::exp(lk)), 1e-300)));
    }
  }
  double operator()(double k) const {
    if (k <= 0) return 0.0;
    double lk = std::log(k);
    std::size_t n = lk_.size();
    if (lk <= lk_.front()) return std::exp(lp_.front() + 2.0 * (lk - lk_.front()));
    if (lk >= lk_.back()) {
      double s = (lp_[n - 1] - lp_[n - 2]) / (lk_[n - 1] - lk_[n - 2]);
      return std::exp(lp_.back() + s * (lk - lk_.back()));
    }
    double pos = (lk - lk_.front()) / (lk_[1] - lk_[0]);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), n - 2);
    double w = pos - i;
    return std::exp(lp_[i] + w * (lp_[i + 1] - lp_[i]));
  }

 private:
  std::vector<double> lk_, lp_;
};

double time_integrated_density_impl(const std::function<double(double)>& psi, double t, double z) {
  auto f = [&](double xi) {
    double p = psi(xi);
    if (p < 1e-12) return t - 0.5 * t * t * p;
    return -std::expm1(-t * p) / p;
  };
  return fourier_cos_tail(f, 0.0, z, 1e-10).value / kPi;
}

}  // namespace

double time_integrated_density(const LevyModel& m, double t, double z) {
  if (m.dim() != 1) throw ConfigError("time-integrated density implemented for d = 1");
  if (!(z > 0)) throw DomainError("time-integrated density needs z > 0");
  return time_integrated_density_impl([&](double k) { return m.psi(k); }, t, z);
}

KatoReport kato_diagnostic(const LevyModel& m, const Potential& v, const std::vector<double>& t_set, double base) {
  if (m.dim() != 1) throw ConfigError("Kato diagnostic implemented for d = 1");
  if (t_set.empty()) throw ConfigError("Kato diagnostic needs a non-empty t set");
  KatoReport rep;
  rep.t_set = t_set;
  std::sort(rep.t_set.begin(), rep.t_set.end());
  const double tmin = rep.t_set.front();
  if (!(tmin > 0)) throw DomainError("Kato diagnostic needs t > 0");
  if (!(base > 0)) base = tmin / 32;
  rep.resolutions = {base, base / 4, base / 16};
  std::function<double(double)> psi;
  std::optional<SymbolTable> table;
  if (m.closed_form().kind != ClosedForm::Kind::none && !m.flattening()) {
    psi = [&](double k) { return m.psi(k); };
  } else {
    table.emplace(m);
    psi = [&](double k) { return (*table)(k); };
  }
  const double X = 2.0 * std::max(1.0, v.feature_radius());
  for (double t : rep.t_set) {
    // U_t on log-spaced z with linear interpolation in log z
    const double zlo = rep.resolutions.back() / 2, zhi = t;
    const int nz = 160;
    std::vector<double> lz(nz), U(nz);
    for (int i = 0; i < nz; ++i) {
      lz[i] = std::log(zlo) + (std::log(zhi) - std::log(zlo)) * i / (nz - 1);
      U[i] = time_integrated_density_impl(psi, t, std::exp(lz[i]));
    }
    auto Ut = [&](double z) {
      double pos = (std::log(z) - lz[0]) / (lz[1] - lz[0]);
      int i = std::clamp(static_cast<int>(pos), 0, nz - 2);
      double w = std::clamp(pos - i, 0.0, 1.0);
      return std::max(0.0, U[i] + w * (U[i + 1] - U[i]));
    };
    std::vector<double> row;
    for (double hr : rep.resolutions) {
      const int M = std::max(1, static_cast<int>(std::floor(t / hr)));
      std::vector<double> w(M);
      for (int j = 0; j < M; ++j) w[j] = Ut((j + 0.5) * hr) * hr;
      auto absV = [&](double y) {
        y = std::abs(y);
        return std::abs(y < hr ? v(hr) : v(y));
      };
      double step = std::max(hr, std::round(t / 4 / hr) * hr);
      double best = 0;
      for (double x = -std::floor(X / step) * step; x <= X + 1e-12; x += step) {
        double s = 0;
        for (int j = 0; j < M; ++j) {
          double z = (j + 0.5) * hr;
          s += w[j] * (absV(x + z) + absV(x - z));
        }
        best = std::max(best, s);
      }
      row.push_back(best);
    }
    rep.values.push_back(row);
    rep.curve.push_back(row.back());
  }

  // resolution sensitivity decides whether the curve can be trusted
  bool stable = true, blowup = false;
  for (auto& row : rep.values) {
    double d1 = row[1] - row[0], d2 = row[2] - row[1];
    double rel = std::abs(d2) / std::max(row[2], 1e-300);
    double q = d1 > 0 ? d2 / d1 : 0.0;
    if (rel > 0.01 && q > 0.7) stable = false;
    if (rel > 0.01 && q > 1.5) blowup = true;
  }
  if (blowup) {
    rep.verdict = "fail";
    rep.reason = "value grows geometrically under grid refinement (potential too singular for this process)";
  } else if (!stable) {
    rep.verdict = "inconclusive";
    rep.reason = "value keeps growing slowly under refinement (borderline singularity)";
  } else {
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.curve.size(); ++i) decreasing = decreasing && rep.curve[i - 1] <= rep.curve[i] * (1 + 1e-9);
    bool small = rep.curve.size() < 2 || rep.curve.front() < 0.5 * rep.curve.back();
    if (decreasing && small) {
      rep.verdict = "pass";
      rep.reason = "resolution-stable curve decreasing toward 0 as t -> 0";
    } else {
      rep.verdict = "fail";
      rep.reason = "curve plateaus as t -> 0";
    }
  }
  return rep;
}

}  // namespace levy
