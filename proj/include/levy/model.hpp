#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levy/profile.hpp"

namespace levy {

/// Analytic symbol used instead of quadrature when present.
struct ClosedForm {
  enum class Kind { none, stable, relativistic };
  Kind kind = Kind::none;
  double alpha = 1.0;
  double mass = 1.0;
};

/// (gamma1, gamma2, C20, C21): C20 l^{-d-gamma1} g(r) <= g(l r) <= C21 l^{-d-gamma2} g(r), l <= 1.
struct WeakScaling {
  double gamma1 = 0, gamma2 = 0, c20 = 1, c21 = 1;
};

/// nu flattened to a constant level on the annulus r_lo <= |x| <= r_hi.
struct Flattening {
  double r_lo = 1, r_hi = 4;
  double level = 0;
};

class LevyModel {
 public:
  LevyModel(int dim, double diffusion, Profile profile, double scale = 1.0);

  int dim() const { return dim_; }
  double diffusion() const { return a_; }
  const Profile& profile() const { return profile_; }
  double scale() const { return scale_; }

  double c26() const { return c26_; }
  double c27() const { return c27_; }
  /// Comparability constant of nu against its profile, max(C27, 1/C26).
  double c5() const;
  void set_comparability(double c26, double c27);

  const std::optional<WeakScaling>& weak_scaling() const { return weak_; }
  void set_weak_scaling(WeakScaling w) { weak_ = w; }

  const ClosedForm& closed_form() const { return closed_; }
  void set_closed_form(ClosedForm c) { closed_ = c; }

  const std::optional<Flattening>& flattening() const { return flat_; }
  void set_flattening(Flattening f) { flat_ = f; }

  std::string name;

  /// Intensity as a function of |x| > 0; throws DomainError at 0.
  double nu_radial(double r) const;
  double log_nu_radial(double r) const;
  double nu(const std::vector<double>& x) const;

  /// Characteristic exponent at |xi| = k (closed form when available).
  double psi(double k) const;
  double psi(const std::vector<double>& xi) const;
  /// Characteristic exponent by quadrature of the Levy-Khinchin integral, ignoring any closed form.
  double psi_quadrature(double k, double* error = nullptr) const;
  double psi_closed(double k) const;

  /// sup_{|xi| <= r} psi(xi) by dense sampling plus golden-section refinement.
  double big_psi(double r) const;
  /// Pruitt function ||A||/r^2 + \int min(1, |y|^2/r^2) nu(dy).
  double pruitt_H(double r) const;
  /// nu(B(0,s)^c).
  double tail_mass(double s) const;
  /// \int_{|y| <= s} |y|^2 nu(dy).
  double second_moment_inside(double s) const;

  /// Surface area of the unit sphere in R^d (2 for d = 1).
  double sphere_area() const;
  double ball_volume(double r) const;

 private:
  double psi_levy(double k, double* err) const;
  double psi_flat_correction(double k) const;
  double tail_integral(double s) const;

  int dim_;
  double a_;
  Profile profile_;
  double scale_;
  double c26_ = 1.0, c27_ = 1.0;
  std::optional<WeakScaling> weak_;
  ClosedForm closed_;
  std::optional<Flattening> flat_;
};

/// 1 - j_d(u): spherical average of 1 - cos over the unit sphere in R^d.
double omega(int d, double u);

/// Normalizing constant of the isotropic alpha-stable intensity with symbol |xi|^alpha.
double stable_constant(int d, double alpha);

namespace presets {

LevyModel stable(int d, double alpha, double diffusion = 0.0);
/// Relativistic alpha = 1 model with symbol sqrt(|xi|^2 + m^2) - m; profile tabulated from Bessel K.
LevyModel relativistic(int d, double mass);
LevyModel polynomial(int d, double gamma, double delta, double diffusion = 0.0);
LevyModel subexponential(int d, double gamma, double c, double beta, double delta, double diffusion = 0.0);
LevyModel exponential(int d, double gamma, double c, double delta, double diffusion = 0.0);
LevyModel superexponential(int d, double gamma, double c, double beta, double delta, double diffusion = 0.0);
/// Brownian motion with generator a*Laplacian, with a negligible polynomial jump part.
LevyModel diffusion_dominated(int d, double a, double jump_scale = 1e-12);

}  // namespace presets

/// Measured comparability between big_psi and pruitt_H over a radius range.
struct PruittComparability {
  double c1 = 0, c2 = 0;
  std::vector<double> radii, ratios;
};
PruittComparability pruitt_comparability(const LevyModel& m, double r_lo, double r_hi, int samples = 33);

/// Geometric constant of the shell inequality between nu-masses of adjacent shells (d = 1).
struct ShellReport {
  double c8 = 0;
  std::vector<double> radii, worst;
};
ShellReport shell_constant(const LevyModel& m, const std::vector<double>& radii, double y_span = 32.0, int y_samples = 65);

}  // namespace levy
