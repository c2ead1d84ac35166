#pragma once

#include <string>
#include <variant>
#include <vector>

namespace levy {

namespace pot {
/// -a on the closed ball |b x| <= 1.
struct Well { double a = 1, b = 1; };
/// -(a1 |x|^{-beta1} min a2 |x|^{-beta2}).
struct Coulomb { double a1 = 1, a2 = 1, beta1 = 0.5, beta2 = 1; };
/// -(a1 |x|^{-beta1} min a2 |x|^{-beta2} e^{-b|x|}).
struct Yukawa { double a1 = 1, a2 = 1, beta1 = 0.5, beta2 = 1, b = 1; };
/// -a / cosh^2(b |x|).
struct PoschlTeller { double a = 1, b = 1; };
/// a ((1 - e^{-b(|x| - r0)})^2 - 1).
struct Morse { double a = 1, b = 1, r0 = 1; };
/// |x|^{2 beta}.
struct ConfiningPower { double beta = 1; };
/// Values at |x| on increasing radii, linear interpolation, constant beyond the ends.
struct Table { std::vector<double> radii, values; };
/// V = 0.
struct Free {};
}  // namespace pot

using PotentialSpec =
    std::variant<pot::Well, pot::Coulomb, pot::Yukawa, pot::PoschlTeller, pot::Morse, pot::ConfiningPower, pot::Table, pot::Free>;

class Potential {
 public:
  Potential(PotentialSpec spec = pot::Free{});

  /// V(|x|); may be -inf/nan at 0 for singular variants.
  double operator()(double r) const;
  const PotentialSpec& spec() const { return spec_; }
  std::string kind() const;
  bool confining() const;
  bool singular() const;
  /// Singularity exponent beta1 of Coulomb/Yukawa variants, 0 otherwise.
  double singular_exponent() const;
  /// Smallest radius beyond which |V| <= delta (searched up to r_max), +inf if none.
  double settle_radius(double delta, double r_max = 1e4) const;
  /// Radius scale of the potential's features (well width, Morse minimum, ...).
  double feature_radius() const;

 private:
  PotentialSpec spec_;
};

}  // namespace levy
