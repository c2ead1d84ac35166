#include "levy/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levy/errors.hpp"

namespace levy {

Potential::Potential(PotentialSpec spec) : spec_(std::move(spec)) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, pot::Well>) {
          if (!(p.a > 0 && p.b > 0)) throw ConfigError("Well needs a > 0 and b > 0");
        } else if constexpr (std::is_same_v<T, pot::Coulomb>) {
          if (!(p.a1 > 0 && p.a2 > 0 && p.beta1 > 0 && p.beta2 >= p.beta1))
            throw ConfigError("Coulomb needs a1, a2 > 0 and 0 < beta1 <= beta2");
        } else if constexpr (std::is_same_v<T, pot::Yukawa>) {
          if (!(p.a1 > 0 && p.a2 > 0 && p.beta1 > 0 && p.beta2 >= p.beta1 && p.b > 0))
            throw ConfigError("Yukawa needs a1, a2, b > 0 and 0 < beta1 <= beta2");
        } else if constexpr (std::is_same_v<T, pot::PoschlTeller>) {
          if (!(p.a > 0 && p.b > 0)) throw ConfigError("PoschlTeller needs a > 0 and b > 0");
        } else if constexpr (std::is_same_v<T, pot::Morse>) {
          if (!(p.a > 0 && p.b > 0 && p.r0 > 0)) throw ConfigError("Morse needs a, b, r0 > 0");
        } else if constexpr (std::is_same_v<T, pot::ConfiningPower>) {
          if (!(p.beta > 0)) throw ConfigError("ConfiningPower needs beta > 0");
        } else if constexpr (std::is_same_v<T, pot::Table>) {
          if (p.radii.size() < 2 || p.radii.size() != p.values.size())
            throw ConfigError("potential table needs at least two (radius, value) pairs");
          for (std::size_t i = 1; i < p.radii.size(); ++i)
            if (!(p.radii[i] > p.radii[i - 1])) throw ConfigError("potential table radii must increase");
        }
      },
      spec_);
}

double Potential::operator()(double r) const {
  r = std::abs(r);
  return std::visit(
      [r](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, pot::Well>) {
          return p.b * r <= 1.0 ? -p.a : 0.0;
        } else if constexpr (std::is_same_v<T, pot::Coulomb>) {
          if (r == 0) return -std::numeric_limits<double>::infinity();
          return -std::min(p.a1 * std::pow(r, -p.beta1), p.a2 * std::pow(r, -p.beta2));
        } else if constexpr (std::is_same_v<T, pot::Yukawa>) {
          if (r == 0) return -std::numeric_limits<double>::infinity();
          return -std::min(p.a1 * std::pow(r, -p.beta1), p.a2 * std::pow(r, -p.beta2) * std::exp(-p.b * r));
        } else if constexpr (std::is_same_v<T, pot::PoschlTeller>) {
          double c = std::cosh(p.b * r);
          return -p.a / (c * c);
        } else if constexpr (std::is_same_v<T, pot::Morse>) {
          double e = 1.0 - std::exp(-p.b * (r - p.r0));
          return p.a * (e * e - 1.0);
        } else if constexpr (std::is_same_v<T, pot::ConfiningPower>) {
          return std::pow(r, 2.0 * p.beta);
        } else if constexpr (std::is_same_v<T, pot::Table>) {
          if (r <= p.radii.front()) return p.values.front();
          if (r >= p.radii.back()) return p.values.back();
          auto it = std::upper_bound(p.radii.begin(), p.radii.end(), r);
          std::size_t i = it - p.radii.begin();
          double w = (r - p.radii[i - 1]) / (p.radii[i] - p.radii[i - 1]);
          return p.values[i - 1] + w * (p.values[i] - p.values[i - 1]);
        } else {
          return 0.0;
        }
      },
      spec_);
}

std::string Potential::kind() const {
  static const char* names[] = {"well", "coulomb", "yukawa", "poschl_teller", "morse", "confining_power", "table", "free"};
  return names[spec_.index()];
}

bool Potential::confining() const { return std::holds_alternative<pot::ConfiningPower>(spec_); }

bool Potential::singular() const {
  return std::holds_alternative<pot::Coulomb>(spec_) || std::holds_alternative<pot::Yukawa>(spec_);
}

double Potential::singular_exponent() const {
  if (auto* c = std::get_if<pot::Coulomb>(&spec_)) return c->beta1;
  if (auto* y = std::get_if<pot::Yukawa>(&spec_)) return y->beta1;
  return 0.0;
}

double Potential::feature_radius() const {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, pot::Well> || std::is_same_v<T, pot::PoschlTeller>) return 1.0 / p.b;
        else if constexpr (std::is_same_v<T, pot::Morse>) return p.r0 + 1.0 / p.b;
        else if constexpr (std::is_same_v<T, pot::Table>) return p.radii.back();
        else return 1.0;
      },
      spec_);
}

double Potential::settle_radius(double delta, double r_max) const {
  if (confining()) return std::numeric_limits<double>::infinity();
  // scan outward on a fine grid, then report the first radius after the last violation
  double last_bad = 0.0;
  const int n = 200000;
  for (int i = n; i >= 1; --i) {
    double r = r_max * i / n;
    if (std::abs((*this)(r)) > delta) {
      last_bad = r;
      break;
    }
  }
  if (last_bad >= r_max) return std::numeric_limits<double>::infinity();
  return last_bad > 0 ? last_bad + r_max / n : 0.0;
}

}  // namespace levy
