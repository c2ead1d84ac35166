#pragma once

#include <cstddef>
#include <functional>

namespace levy {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 2000;
  bool throw_on_failure = true;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod on [a,b] (bisects the interval with the largest error).
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt = {});

/// Same as integrate() but the initial partition is [a,b] cut into `pieces` equal parts.
QuadResult integrate_split(const Integrand& f, double a, double b, int pieces, const QuadOptions& opt = {});

/// \int_a^\infty f(r) dr for a > 0 via r = a exp(u), u = s/(1-s), suited to power-law and faster tails.
QuadResult integrate_tail(const Integrand& f, double a, const QuadOptions& opt = {});

/// \int_b^\infty f(r) cos(k r) dr and the sine analogue, for smooth f decaying at infinity.
/// Uses the Ooura double-exponential Fourier rule on the shifted variable r = b + t.
QuadResult fourier_cos_tail(const Integrand& f, double b, double k, double rel_tol = 1e-12);
QuadResult fourier_sin_tail(const Integrand& f, double b, double k, double rel_tol = 1e-12);

}  // namespace levy
