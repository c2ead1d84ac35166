#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levy/fft.hpp"
#include "levy/model.hpp"
#include "levy/potential.hpp"

namespace levy {

/// Periodic grid on [-L, L): x_k = -L + k h, h = 2L/N, frequencies xi_j = pi j / L, j = 0..N/2.
struct Grid1D {
  double L = 32;
  int N = 1024;

  Grid1D() = default;
  Grid1D(double half_width, int nodes);
  double h() const { return 2 * L / N; }
  double x(int k) const { return -L + k * h(); }
  double xi(int j) const;
  std::vector<double> nodes() const;
  /// Index of the node nearest to x.
  int index_of(double x) const;
};

/// Piecewise cubic interpolant of psi in log |xi|, refined by bisection until the midpoint
/// prediction matches psi to a relative tolerance; power-law extrapolation outside [k_lo, k_hi].
/// Pieces narrower than `min_width` in |xi| fall back to direct evaluation.
class SymbolInterpolant {
 public:
  SymbolInterpolant(const LevyModel& m, double k_lo, double k_hi, double tol = 1e-10, double min_width = 0.0);
  double operator()(double k) const;
  int evaluations() const { return evaluations_; }

 private:
  struct Piece {
    double a, b;
    double f[4];
    bool direct;
  };
  void refine(double a, double b, double fa, double fb, double tol, double min_width);

  const LevyModel* model_;
  std::vector<Piece> pieces_;
  double lo_slope_ = 2, hi_slope_ = 1;
  int evaluations_ = 0;
};

/// psi sampled on the grid frequencies xi_0..xi_{N/2}.
std::vector<double> sample_symbol(const LevyModel& m, const Grid1D& g);
/// V on the grid; |x| < h is replaced by V(h); non-finite values raise DomainError.
std::vector<double> sample_potential(const Potential& v, const Grid1D& g);

/// H = psi(-i d/dx) + V as a matrix-free operator on grid fields.
class Hamiltonian {
 public:
  Hamiltonian(const LevyModel& m, const Potential& v, const Grid1D& g);
  Hamiltonian(std::vector<double> symbol, std::vector<double> potential, const Grid1D& g);

  const Grid1D& grid() const { return grid_; }
  const std::vector<double>& symbol() const { return symbol_; }
  const std::vector<double>& potential() const { return V_; }
  int size() const { return grid_.N; }

  void apply(const double* in, double* out) const;
  std::vector<double> apply(const std::vector<double>& in) const;
  /// Fourier multiplier only (the free operator psi(-i d/dx)).
  void apply_free(const double* in, double* out) const;
  /// out = F^{-1}[ m(xi) F[in] ] for an arbitrary multiplier sampled on xi_0..xi_{N/2}.
  void apply_multiplier(const std::vector<double>& mult, const double* in, double* out) const;
  /// One symmetric imaginary-time splitting step exp(-dt V/2) exp(-dt psi) exp(-dt V/2).
  void split_step(double dt, double* field) const;

 private:
  Grid1D grid_;
  std::vector<double> symbol_;
  std::vector<double> V_;
  mutable RealFFT fft_;
  mutable std::vector<std::complex<double>> spec_;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 3000;
  double dt = 0.1;
  int imaginary_steps = 400;
  /// Extra block vectors carried to speed up convergence of the wanted ones.
  int guard = 2;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> vectors;  ///< grid fields normalized to h sum phi^2 = 1
  std::vector<double> residuals;             ///< ||H phi - lambda phi|| in the same norm
  std::vector<std::pair<double, double>> mu; ///< (r, mu_r) Dirichlet values when requested
  Grid1D grid;
  int iterations = 0;
  std::string method;
  double floor = 0;                      ///< eigenvalues above -floor are not reported as discrete
  bool no_discrete_ground_state = false;
  bool fewer_than_requested = false;
  bool converged = false;
  double min_phi0 = 0;                   ///< minimum of the ground state after sign choice
};

/// Lowest eigenpair; imaginary-time splitting start then preconditioned block iteration.
SpectrumResult ground_state(const Hamiltonian& H, const SolverOptions& opt = {});
/// k lowest eigenpairs; eigenvalues above -floor are dropped and flagged.
SpectrumResult excited_states(const Hamiltonian& H, int k, const SolverOptions& opt = {});

/// Generic locally optimal block preconditioned conjugate gradient for the smallest eigenpairs.
struct BlockResult {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;  ///< Euclidean-normalized
  std::vector<double> residuals;             ///< Euclidean residual norms
  int iterations = 0;
  bool converged = false;
};
using LinearOp = std::function<void(const double*, double*)>;
BlockResult lobpcg(int n, const LinearOp& A, const LinearOp& T, std::vector<std::vector<double>> X0, int wanted,
                   double tol, int max_iter, const std::vector<char>* mask = nullptr);

/// Principal eigenvalue of the free operator killed outside B(0, r) (open ball), r < L/4.
double dirichlet_mu(const Hamiltonian& H, double r, double tol = 1e-10);
double dirichlet_mu(const LevyModel& m, double r, const Grid1D& g, double tol = 1e-10);

struct SmallevRow {
  double r = 0, lambda0 = 0, sup_vplus = 0, inf_vminus = 0, mu = 0, bound = 0, margin = 0;
  bool pass = false;
};
std::vector<SmallevRow> smallev_check(const Hamiltonian& H, double lambda0, const std::vector<double>& r_set);

struct KatoReport {
  std::vector<double> t_set;
  std::vector<double> resolutions;            ///< grid spacings used for the quadrature
  std::vector<std::vector<double>> values;    ///< [t][resolution]
  std::vector<double> curve;                  ///< finest-resolution values per t
  std::string verdict;                        ///< pass | fail | inconclusive
  std::string reason;
};
/// sup_x \int_0^t \int_{B(x,t)} p(s, x-y) |V(y)| dy ds over t_set (d = 1).
KatoReport kato_diagnostic(const LevyModel& m, const Potential& v, const std::vector<double>& t_set,
                           double base_spacing = 0.0);

/// U_t(z) = \int_0^t p(s, z) ds for d = 1, z > 0.
double time_integrated_density(const LevyModel& m, double t, double z);

}  // namespace levy
