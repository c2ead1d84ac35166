#pragma once

#include <vector>

#include "levy/model.hpp"

namespace levy {

/// Transition density p(t, .) sampled on a uniform grid (radial abscissae for d >= 2).
struct DensitySlice {
  double t = 0;
  std::vector<double> x;
  std::vector<double> values;
  double mass = 0;          ///< trapezoidal mass on the grid (radial shells for d >= 2)
  int violations = 0;       ///< values below -clip_threshold, left untouched
  double min_raw = 0;       ///< most negative raw value before clipping
  double clip_threshold = 1e-12;
};

struct DensityOptions {
  /// FFT period is at least this multiple of the requested grid extent.
  double period_factor = 8.0;
  /// Minimum FFT period in absolute units; power-tailed models use at least 2048 unless the FFT would exceed 2^22.
  double min_period = 0.0;
  double clip_threshold = 1e-12;
};

/// Frequency beyond which t psi exceeds `level`; throws DomainError when exp(-t psi) is not integrable.
double cutoff_frequency(const LevyModel& m, double t, double level = 40.0);

DensitySlice transition_density(const LevyModel& m, double t, const std::vector<double>& grid,
                                const DensityOptions& opt = {});

/// Uniform grid helper: n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

struct RegularityReport {
  double c17 = 0;                   ///< sup p(t,x)/p(t,y) over |x| >= |y| >= R, |x-y| <= 1
  double c9 = 0;                    ///< sup_{t,r} sup_{|x|>=r} p(t,x) / (t Psi(1/r) / r^d)
  std::vector<double> t_set, r_set;
  std::vector<std::vector<double>> c9_table;  ///< [t][r]
  std::vector<double> c17_per_t;
  bool c9_growth = false;
  bool c17_growth = false;
  double radius = 1.0;
};

RegularityReport density_regularity_checks(const LevyModel& m, const std::vector<double>& t_set,
                                           const std::vector<double>& r_set, double radius = 1.0);

/// p(t, 0) = (2 pi)^{-d} \int exp(-t psi(xi)) dxi.
double density_at_origin(const LevyModel& m, double t);

}  // namespace levy
