#pragma once

#include <string>
#include <variant>
#include <vector>

namespace levy {

struct Polynomial {
  double gamma = 1.0;
  double delta = 1.0;
};

struct SubExponential {
  double gamma = 1.0;
  double c = 1.0;
  double beta = 0.5;
  double delta = 0.0;
};

struct Exponential {
  double gamma = 1.0;
  double c = 1.0;
  double delta = 0.0;
};

struct SuperExponential {
  double gamma = 1.0;
  double c = 1.0;
  double beta = 2.0;
  double delta = 0.0;
};

/// Sampled profile; log-log interpolation inside, power-law extrapolation outside.
struct UserTable {
  std::vector<double> radii;
  std::vector<double> values;
};

using ProfileSpec = std::variant<Polynomial, SubExponential, Exponential, SuperExponential, UserTable>;

/// Radial profile g of a Levy intensity in dimension d.
///
/// For r <= small_radius() the profile is exactly small_coefficient() * r^{-d-gamma};
/// beyond it the family's large-r formula holds. The small branch is scaled to meet the
/// large-r branch at r = 1, so g(1) is the value of the large-r formula.
class Profile {
 public:
  Profile(ProfileSpec spec, int dim);

  double g(double r) const;
  double log_g(double r) const;

  int dim() const { return dim_; }
  const ProfileSpec& spec() const { return spec_; }
  std::string family() const;

  double small_radius() const { return r_small_; }
  double small_coefficient() const { return g_small_; }
  double small_exponent() const { return gamma_; }

  /// True when g decays like a power of r at infinity (Polynomial, or a table with power tail).
  bool power_tail() const;
  /// Exponent p with g ~ r^{-p} at infinity for power tails, +inf otherwise.
  double tail_exponent() const;

 private:
  double log_large(double r) const;

  ProfileSpec spec_;
  int dim_;
  double gamma_ = 1.0;
  double r_small_ = 1.0;
  double g_small_ = 1.0;
  std::vector<double> log_r_, log_v_, slope_;
};

}  // namespace levy
