#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levy/model.hpp"
#include "levy/potential.hpp"

namespace levy {

struct Window {
  double lo = 0, hi = 0;
};

/// Statistics of phi/nu on the window. Logs are kept because nu may underflow.
struct RatioStats {
  double min = 0, max = 0, median = 0;
  double log_min = 0, log_max = 0, log_median = 0;
  double log_first = 0, log_last = 0;  ///< log ratio at the window ends
  double cap = 25;
  bool comparable = false;             ///< max/min <= cap
  int nodes = 0;
};

/// Throws ConfigError when the window leaves [0.1 L, 0.5 L] for a grid half-width L > 0.
RatioStats tail_ratio(const std::vector<double>& x, const std::vector<double>& phi, const LevyModel& m, Window w,
                      double cap = 25.0, double grid_half_width = 0.0);

enum class FitFamily { power, stretched_exp, exp };
const char* to_string(FitFamily f);

struct FitSpec {
  FitFamily family = FitFamily::power;
  std::optional<double> beta;   ///< fixed stretched exponent; free when empty
  std::optional<double> delta;  ///< fixed power correction; free when empty
  bool log_spaced = true;       ///< sample the window log-uniformly instead of every node
  int samples = 256;
};

struct FitResult {
  FitFamily family = FitFamily::power;
  double amplitude = 0;  ///< log-amplitude A
  double rate = 0;       ///< c (exp families) or 0
  double beta = 0;       ///< stretched exponent (1 for exp, 0 for power)
  double power = 0;      ///< p for power fits, delta otherwise
  double r2 = 0;
  double rms = 0;
  int n = 0;
};

/// Least squares on log phi: power -p log x; stretched -c x^beta - delta log x; exp -c x - delta log x.
FitResult fit_decay(const std::vector<double>& x, const std::vector<double>& phi, Window w, const FitSpec& spec);

enum class Regime { nu_driven, lambda_driven, slower_than_nu, confining_nu_over_v, not_nu_driven, inconclusive };
const char* to_string(Regime r);

struct RegimeInput {
  double lambda0 = 0;
  FitResult fit;
  double eta0 = 0;
  std::optional<RatioStats> ratio;
  std::optional<bool> jump_paring_pass;
  /// (|lambda0|, fitted rate) pairs from a depth sweep; >= 3 entries enable "lambda-driven".
  std::vector<std::pair<double, double>> sweep;
  bool confining = false;
  double tolerance = 0.15;
};

struct RegimeResult {
  Regime regime = Regime::inconclusive;
  std::vector<Regime> candidates;
  std::string reason;
};

RegimeResult classify_regime(const LevyModel& m, const RegimeInput& in);

struct LowerBoundCertificate {
  double K = 0;
  double radius = 0;    ///< r with sup_{|y|>=r} |V| <= delta
  double c5 = 1, c6 = 1;
  double mass_inside = 0;
  double survival = 0;
  bool pass = false;
  double worst_margin = 0;  ///< min over window of phi/(K nu)
};

/// C6 estimate: max g(r)/g(r+1) over r in [1, r_max].
double measure_c6(const LevyModel& m, double r_max);

LowerBoundCertificate lower_bound_certificate(const LevyModel& m, const Potential& v, const std::vector<double>& x,
                                              const std::vector<double>& phi, double lambda, double delta,
                                              double survival, Window w);

struct HittingPoint {
  double x = 0, value = 0, ci = 0;
};

struct OverlayReport {
  double c_hat = 0;
  std::vector<double> ratios;
  double spread = 1;          ///< max/min of value/nu
  std::string stability;      ///< "stable" (spread <= factor), "unstable", or "n/a"
};

OverlayReport hitting_overlay(const std::vector<HittingPoint>& pts, const LevyModel& m, double factor = 2.0);

/// Everything the decay analysis says about one field on one window.
struct DecayReport {
  Window window;
  RatioStats ratio;
  FitResult fit;
  RegimeResult regime;
  std::optional<LowerBoundCertificate> lower;
  std::vector<std::string> notes;
};

/// Ratio statistics, fit and a single-run regime label (no sweep) for a ground state.
DecayReport analyze_decay(const LevyModel& m, const std::vector<double>& x, const std::vector<double>& phi, Window w,
                          const FitSpec& fit, double lambda0, double eta0 = 0, double grid_half_width = 0,
                          double cap = 25.0, bool confining = false);

/// Nodes of a grid field inside |x| in [lo, hi] on the positive side (x ascending).
void window_slice(const std::vector<double>& x, const std::vector<double>& phi, Window w, std::vector<double>& xs,
                  std::vector<double>& ps);

}  // namespace levy
