#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "levy/errors.hpp"
#include "levy/mc.hpp"
#include "levy/model.hpp"

namespace levy {

struct SupOptions {
  /// Running sup must change by less than this fraction over the last doubling of X_max.
  double stabilization = 0.01;
  int min_doublings = 4;
  int max_doublings = 24;
  int points_per_doubling = 8;
  double rel_tol = 1e-8;
};

/// sup over |x| >= s of \int_{|x-y|>s, |y|>s} nu(x-y) nu(y) dy / nu(x).
struct K1Result {
  double s = 0;
  double value = 0;
  double x_at = 0;     ///< where the sup was attained
  double x_max = 0;    ///< end of the sampled |x| range
  bool stabilized = false;
  std::vector<double> x, ratio;
};
K1Result k1(const LevyModel& m, double s, const SupOptions& opt = {});

/// The convolution ratio at a single |x| (|x| >= s).
double k1_ratio(const LevyModel& m, double s, double x, double rel_tol = 1e-8);

/// inf{C >= 1 : nu(x-y) <= C nu(x), |y| <= s1, s2 <= |x| < s3}; s3 = inf allowed.
struct K2Result {
  double value = 1;
  double x_at = 0;
  bool antipodal = true;  ///< false when the 2-D fallback search was used
  bool inconclusive = false;
};
K2Result k2_search(const LevyModel& m, double s1, double s2, double s3);
double k2(const LevyModel& m, double s1, double s2, double s3);

/// Constants of the Green-function bound; C9, C10 and C4 are required.
struct K3Constants {
  std::optional<double> c9, c10, c4;
  double theta = 0;
  /// Doubling constant of Psi and the Pruitt comparability constants; measured when absent.
  std::optional<double> doubling, c1, c2;
};

struct K3Bound {
  double s = 0;
  double value = 0;
  double terms[3] = {0, 0, 0};
  double green_diagnostic = 0;  ///< value * Psi(1/s) * s^d
};
K3Bound k3_upper(const LevyModel& m, double s, const K3Constants& k);

/// sup Psi(2r)/Psi(r) over log-spaced r in [r_lo, r_hi].
double psi_doubling(const LevyModel& m, double r_lo, double r_hi, int samples = 25);
/// inf{r : Psi(r) = level}.
double psi_inverse_lower(const LevyModel& m, double level);
/// sup_t \int e^{-t psi} / (Psi_*^{-1}(1/t))^d over the given times.
double measure_c10(const LevyModel& m, const std::vector<double>& t_set);

/// ||L f_s||_inf for the C^2 bump f = 1 on B(0,1/2), 0 off B(0,1), f_s = f(./s).
struct C3Result {
  double s = 0;
  double value = 0;
  double x_at = 0;
  int nodes = 0;
};
C3Result c3_bound(const LevyModel& m, double s, int nodes = 161);
/// Profile of the bump: f, f', f'' at radius r.
void bump(double r, double& f, double& f1, double& f2);
/// (L f_s)(x) at radius |x| = r.
double generator_on_bump(const LevyModel& m, double s, double r);

/// Mean exit time from B(0, r) and survival P^0(tau > t): Monte Carlo, the analytic bound C4/Psi(1/r), or both.
class ExitTimeSource {
 public:
  static ExitTimeSource monte_carlo(const LevyModel& m, PathConfig cfg);
  static ExitTimeSource analytic(const LevyModel& m, double c4);
  ExitTimeSource with_analytic(double c4) const;

  struct Value {
    double value = 0, ci_halfwidth = 0;
    std::string method;
  };
  /// Best estimate of E^0[tau_{B(0,r)}]: Monte Carlo when available.
  Value expected(double r) const;
  /// Upper estimate: the analytic bound when C4 is known, else Monte Carlo mean + half-width.
  double expected_upper(double r) const;
  /// P^0(tau_{B(0,r)} > t); requires Monte Carlo.
  Value survival(double r, double t) const;
  bool has_mc() const { return cfg_.has_value(); }
  std::optional<double> c4() const { return c4_; }

 private:
  const LevyModel* model_ = nullptr;
  std::optional<PathConfig> cfg_;
  std::optional<double> c4_;
  struct Cache {
    std::mutex mu;
    std::map<std::pair<double, double>, ExitTimeEstimate> runs;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
  ExitTimeEstimate run(double r, double t) const;
};

/// K3 provider: the Green-function upper bound, a Monte Carlo Green estimate, or both.
class K3Source {
 public:
  static K3Source bound(const LevyModel& m, K3Constants k);
  static K3Source monte_carlo(const LevyModel& m, PathConfig cfg);
  K3Source with_bound(K3Constants k) const;

  double best(double s) const;
  double upper(double s) const;
  std::string method() const;

 private:
  const LevyModel* model_ = nullptr;
  std::optional<K3Constants> k_;
  std::optional<PathConfig> cfg_;
  struct Cache {
    std::mutex mu;
    std::map<double, GreenEstimate> runs;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

/// Ingredients of h1/h2 at one choice of exit times and K3.
struct HIngredients {
  double s1 = 0, s2 = 0;
  double k2_main = 1;     ///< K2(s1, s2, inf)
  double k2_inner = 1;    ///< K2(s1/4, s1/2, s1)
  double c3_small = 0;    ///< C3 bound at s1/16
  double c3_large = 0;    ///< C3 bound at s1
  double k3 = 0;
  double exit_mean = 0;   ///< E^0[tau_{B(0, 2 s1)}]
  double c13 = 0;
  double nu_sup_quarter = 0, nu_sup_sixteenth = 0;
  double h1 = 0, h2 = 0;
};
/// Assembled from the ingredients except exit_mean and k3, which are supplied.
HIngredients h_functions(const LevyModel& m, double s1, double s2, double exit_mean, double k3);
double h1(const LevyModel& m, double s1, double s2, const ExitTimeSource& exit, const K3Source& k3);
double h2(const LevyModel& m, double s1, const ExitTimeSource& exit, const K3Source& k3);

struct Eta0Result {
  double value = 0;           ///< best estimate
  double lo = 0, hi = 0;      ///< spread from the exit-time half-width
  double conservative = 0;    ///< all ingredients replaced by upper estimates
  double c5 = 1;
  double k1_2 = 0, k2_23 = 1;
  bool k1_stabilized = true;
  HIngredients best, upper;
};
Eta0Result eta0(const LevyModel& m, const ExitTimeSource& exit, const K3Source& k3);

struct Cond1Result {
  double r1 = 0, r2 = 0, r3 = 0, eta = 0;
  double lhs = 0, lhs_hi = 0;  ///< best estimate and upper end of its uncertainty
  double lhs_conservative = 0;
  double margin = 0;           ///< eta - lhs_hi
  Verdict verdict = Verdict::fail;
  std::optional<double> c14;   ///< only on pass
  double R = 0;
};
/// `harmonic_radius` is the r of the harmonic domain B(0,r)^c entering R = (r + r1) v r3 in C14.
Cond1Result cond1_check(const LevyModel& m, double r1, double r2, double r3, double eta, const ExitTimeSource& exit,
                        const K3Source& k3, double harmonic_radius = 1.0);

struct JumpParingAudit {
  double c7 = 0;
  double x_at = 0;
  std::vector<double> x, ratio;
  double last_doubling_growth = 1;  ///< sup over the last doubling / sup before it
  Verdict verdict = Verdict::inconclusive;
};
JumpParingAudit jump_paring_audit(const LevyModel& m, std::vector<double> x_grid = {});

/// sup_{r >= 1} K2(r, 2r, inf) over the sampled radii (the nu doubling constant).
double measure_c15(const LevyModel& m, const std::vector<double>& radii);

struct SmallnessReport {
  double kappa1 = 2;
  std::vector<double> s_set;
  std::vector<double> product;      ///< K1(kappa1 s) K2(s, kappa1 s, inf)
  Verdict killing = Verdict::inconclusive;
  double killing_margin = 0;        ///< largest ratio product[i+1]/product[i]
  std::vector<double> s1_set;
  std::vector<double> limsup;       ///< K2(s1, s_tail, inf) per s1
  double s_tail = 0;
  std::optional<double> kappa2;
  Verdict bounded = Verdict::inconclusive;
  double bounded_margin = 0;        ///< max/min of the limsup sequence
};
SmallnessReport smallness_checks(const LevyModel& m, double kappa1, const std::vector<double>& s_set,
                                 const std::vector<double>& s1_set, std::optional<double> kappa2 = {});

struct SubexpPoint {
  double r = 0;
  double ratio = 0, ci_halfwidth = 0;
  std::string method;  ///< "monte-carlo" or "quadrature"
};
struct SubexpProbe {
  std::vector<SubexpPoint> points;
  std::string classification;  ///< subexponential | jump-paring-non-subexponential | divergent | inconclusive
};
/// P(|J1 + J2| > r) / P(|J1| > r) for J1, J2 iid from nu restricted to |y| >= 1.
SubexpProbe subexponentiality_probe(const LevyModel& m, const std::vector<double>& r_set, long n_samples,
                                    std::uint64_t seed = 1);

struct ConditionOptions {
  std::vector<double> k1_s = {1, 2, 4, 8};
  std::vector<std::array<double, 3>> k2_s = {{1, 2, INFINITY}, {2, 4, INFINITY}, {4, 8, INFINITY}};
  std::vector<double> k3_s = {1, 2, 4, 8, 16};
  double kappa1 = 2;
  std::vector<double> smallness_s = {2, 4, 8, 16};
  std::vector<double> smallness_s1 = {1, 2, 4, 8};
  double h_s1 = 1, h_s2 = 2;
  /// When set, cond1 is evaluated on the lattice r1 in cond1_r1, r2 = 2 r1, r3 = 4 r1.
  std::optional<double> eta;
  std::vector<double> cond1_r1 = {8, 16, 32};
};

struct ConditionReport {
  std::vector<K1Result> k1_samples;
  std::vector<std::pair<std::array<double, 3>, double>> k2_samples;
  std::vector<K3Bound> k3_upper;
  JumpParingAudit jump_paring;
  HIngredients h;
  Eta0Result eta0;
  SmallnessReport smallness;
  std::vector<Cond1Result> cond1;
  double kappa2 = 0;
  struct Item {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    double margin = 0;
    std::string note;
  };
  std::vector<Item> verdicts;
};
ConditionReport condition_report(const LevyModel& m, const ExitTimeSource& exit, const K3Source& k3,
                                 const ConditionOptions& opt = {});

}  // namespace levy
