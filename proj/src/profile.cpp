#include "levy/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levy/errors.hpp"

namespace levy {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_gamma(double gamma) { require(gamma >= 0.0 && gamma < 2.0, "small-r exponent gamma must lie in [0,2)"); }

}  // namespace

Profile::Profile(ProfileSpec spec, int dim) : spec_(std::move(spec)), dim_(dim) {
  require(dim >= 1 && dim <= 3, "dimension must be 1, 2 or 3");
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          check_gamma(p.gamma);
          require(p.delta > 0, "Polynomial tail exponent delta must be > 0");
          gamma_ = p.gamma;
        } else if constexpr (std::is_same_v<T, SubExponential>) {
          check_gamma(p.gamma);
          require(p.c > 0, "SubExponential c must be > 0");
          require(p.beta > 0 && p.beta < 1, "SubExponential beta must lie in (0,1)");
          require(p.delta >= 0, "SubExponential delta must be >= 0");
          gamma_ = p.gamma;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          check_gamma(p.gamma);
          require(p.c > 0, "Exponential c must be > 0");
          require(p.delta >= 0, "Exponential delta must be >= 0");
          gamma_ = p.gamma;
        } else if constexpr (std::is_same_v<T, SuperExponential>) {
          check_gamma(p.gamma);
          require(p.c > 0, "SuperExponential c must be > 0");
          require(p.beta > 1, "SuperExponential beta must be > 1");
          require(p.delta >= 0, "SuperExponential delta must be >= 0");
          gamma_ = p.gamma;
        } else {
          require(p.radii.size() >= 2 && p.radii.size() == p.values.size(),
                  "UserTable needs at least two (radius, value) pairs of equal length");
          for (std::size_t i = 0; i < p.radii.size(); ++i) {
            require(p.radii[i] > 0 && std::isfinite(p.radii[i]), "UserTable radii must be positive");
            require(p.values[i] > 0 && std::isfinite(p.values[i]), "UserTable values must be positive");
            if (i > 0) {
              require(p.radii[i] > p.radii[i - 1], "UserTable radii must be strictly increasing");
              require(p.values[i] <= p.values[i - 1], "UserTable values must be non-increasing (monotone profile)");
            }
            log_r_.push_back(std::log(p.radii[i]));
            log_v_.push_back(std::log(p.values[i]));
          }
          double s0 = (log_v_[1] - log_v_[0]) / (log_r_[1] - log_r_[0]);
          std::size_t n = log_r_.size();
          double s1 = (log_v_[n - 1] - log_v_[n - 2]) / (log_r_[n - 1] - log_r_[n - 2]);
          gamma_ = -s0 - dim;
          require(gamma_ >= 0 && gamma_ < 2,
                  "UserTable small-r slope must lie in (-(d+2), -d] so that nu is a Levy measure of infinite mass");
          require(s1 < -dim, "UserTable tail slope must be < -d so that the tail mass is finite");
          r_small_ = p.radii.front();
          std::vector<double> sec(n - 1);
          for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (log_v_[i + 1] - log_v_[i]) / (log_r_[i + 1] - log_r_[i]);
          slope_.assign(n, 0.0);
          slope_[0] = sec[0];
          slope_[n - 1] = sec[n - 2];
          for (std::size_t i = 1; i + 1 < n; ++i)
            slope_[i] = sec[i - 1] * sec[i] <= 0 ? 0.0 : 2.0 / (1.0 / sec[i - 1] + 1.0 / sec[i]);
        }
      },
      spec_);
  if (std::holds_alternative<UserTable>(spec_)) {
    g_small_ = std::exp(log_v_.front() + (dim_ + gamma_) * log_r_.front());
  } else {
    r_small_ = 1.0;
    g_small_ = std::exp(log_large(1.0));
  }
}

std::string Profile::family() const {
  switch (spec_.index()) {
    case 0: return "polynomial";
    case 1: return "subexponential";
    case 2: return "exponential";
    case 3: return "superexponential";
    default: return "table";
  }
}

double Profile::log_large(double r) const {
  const double lr = std::log(r);
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          return -(dim_ + p.delta) * lr;
        } else if constexpr (std::is_same_v<T, SubExponential> || std::is_same_v<T, SuperExponential>) {
          return -p.c * std::pow(r, p.beta) - p.delta * lr;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -p.c * r - p.delta * lr;
        } else {
          const std::size_t n = log_r_.size();
          if (lr >= log_r_.back()) {
            double s = (log_v_[n - 1] - log_v_[n - 2]) / (log_r_[n - 1] - log_r_[n - 2]);
            return log_v_.back() + s * (lr - log_r_.back());
          }
          auto it = std::upper_bound(log_r_.begin(), log_r_.end(), lr);
          std::size_t i = std::max<std::size_t>(1, it - log_r_.begin());
          // monotone cubic Hermite in log-log coordinates
          double hx = log_r_[i] - log_r_[i - 1];
          double t = (lr - log_r_[i - 1]) / hx;
          double t2 = t * t, t3 = t2 * t;
          return (2 * t3 - 3 * t2 + 1) * log_v_[i - 1] + (t3 - 2 * t2 + t) * hx * slope_[i - 1] +
                 (-2 * t3 + 3 * t2) * log_v_[i] + (t3 - t2) * hx * slope_[i];
        }
      },
      spec_);
}

double Profile::log_g(double r) const {
  if (!(r > 0)) throw DomainError("profile evaluated at r <= 0");
  if (r <= r_small_) return std::log(g_small_) - (dim_ + gamma_) * std::log(r);
  return log_large(r);
}

double Profile::g(double r) const { return std::exp(log_g(r)); }

bool Profile::power_tail() const {
  return std::holds_alternative<Polynomial>(spec_) || std::holds_alternative<UserTable>(spec_);
}

double Profile::tail_exponent() const {
  if (auto* p = std::get_if<Polynomial>(&spec_)) return dim_ + p->delta;
  if (std::holds_alternative<UserTable>(spec_)) {
    std::size_t n = log_r_.size();
    return -(log_v_[n - 1] - log_v_[n - 2]) / (log_r_[n - 1] - log_r_[n - 2]);
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace levy
