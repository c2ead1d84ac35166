#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "levy/model.hpp"
#include "levy/potential.hpp"
#include "levy/spectral.hpp"

namespace levy {

using Rng = std::mt19937_64;

enum class Sampler { compound_poisson_gaussian, exact_stable };
const char* to_string(Sampler s);

struct PathConfig {
  double epsilon = 0.1;   ///< small-jump cutoff radius
  double dt = 1e-3;       ///< Gaussian sub-step
  double horizon = 50.0;  ///< censoring time
  long n_paths = 10000;
  std::uint64_t seed = 1;
  Sampler sampler = Sampler::compound_poisson_gaussian;
  int workers = 0;        ///< 0: LEVYTK_WORKERS or 1
  bool auto_horizon = true;
  int max_doublings = 4;
};

/// Worker count: the explicit request if positive, else LEVYTK_WORKERS, else 1.
int worker_count(int requested);

/// Paths are processed in chunks of this size; chunk c draws from the stream seeded by (seed, c).
inline constexpr long kChunk = 2048;
Rng chunk_rng(std::uint64_t seed, std::uint64_t chunk);

/// Big jumps |y| >= eps drawn from the normalized restriction of nu (radial inverse CDF).
class JumpSampler {
 public:
  JumpSampler(const LevyModel& m, double eps);
  double rate() const { return rate_; }
  double radius(double u) const;
  /// Writes a jump vector of length d.
  void sample(Rng& rng, double* out) const;

 private:
  int dim_;
  double eps_, rate_ = 0;
  std::vector<double> lr_, cdf_;  ///< log radius nodes and cumulative mass
  double tail_mass_ = 0;          ///< mass beyond the last node
  double tail_power_ = 0;         ///< Pareto exponent for the tail beyond the last node (0: none)
};

/// Simulation engine shared by all estimators.
class PathSimulator {
 public:
  PathSimulator(const LevyModel& m, const PathConfig& cfg);

  const LevyModel& model() const { return *model_; }
  const PathConfig& config() const { return cfg_; }
  int dim() const { return model_->dim(); }
  /// Gaussian variance per unit time and coordinate: 2a + (1/d) \int_{|y|<eps} |y|^2 nu(dy).
  double sigma2() const { return sigma2_; }
  double jump_rate() const { return jumps_.rate(); }
  const JumpSampler& jumps() const { return jumps_; }

  /// First time |X| <= r starting from x0 (closed ball), or +inf if not before the horizon.
  double hitting_time(Rng& rng, const double* x0, double r, double horizon) const;
  /// First time |X - c| >= r starting from c (exit of the open ball), +inf if beyond the horizon.
  /// When `exit_pos` is given the exit position is written there.
  double exit_time(Rng& rng, const double* c, double r, double horizon, double* exit_pos = nullptr) const;
  /// X_t from x0; when `V` is given also returns \int_0^t V(X_s) ds (trapezoid on the skeleton).
  void advance(Rng& rng, double* x, double t, const std::function<double(double)>* V = nullptr,
               double* vint = nullptr) const;

 private:
  void gaussian(Rng& rng, double* x, double dt) const;
  void stable_increment(Rng& rng, double* x, double dt) const;

  const LevyModel* model_;
  PathConfig cfg_;
  JumpSampler jumps_;
  double sigma2_ = 0;
  double stable_scale_ = 1;
};

struct PathSkeleton {
  int dim = 1;
  std::vector<double> t;
  std::vector<double> x;  ///< dim values per skeleton time
};

/// Skeleton on [0, cfg.horizon] for path number `index` of the ensemble.
PathSkeleton sample_path(const LevyModel& m, const PathConfig& cfg, const std::vector<double>& x0, long index = 0);

/// Samples of X_t from the origin (d = 1), n = cfg.n_paths.
std::vector<double> sample_increments(const LevyModel& m, const PathConfig& cfg, double t);

struct HittingEstimate {
  double x = 0, r = 0, eta = 0;
  double value = 0, ci_halfwidth = 0;
  double hit_fraction = 0, censored_fraction = 0;
  double horizon = 0;
  bool censoring_resolved = true;  ///< censored contribution below 10% of the CI half-width
};

/// Single hitting time of B(0, r) from x0 (first coordinate x0, others 0); +inf when censored.
double first_hitting(const LevyModel& m, const PathConfig& cfg, double x0, double r, long index = 0);

/// E^x[exp(-eta tau)] for each x and eta on a shared path ensemble per x.
std::vector<HittingEstimate> laplace_hitting(const LevyModel& m, const PathConfig& cfg, const std::vector<double>& xs,
                                             double r, const std::vector<double>& etas);

struct ExitTimeEstimate {
  double r = 0;
  double mean = 0, ci_halfwidth = 0;
  double survival_t = 1, survival = 0, survival_ci = 0;
  double censored_fraction = 0;
};
ExitTimeEstimate exit_time_ball(const LevyModel& m, const PathConfig& cfg, double r, double survival_t = 1.0);

struct MeanEstimate {
  double value = 0, ci_halfwidth = 0;
  long n = 0;
};

/// E^x[exp(-\int_0^t V(X_s) ds) phi(X_t)] for d = 1.
MeanEstimate fk_expectation(const LevyModel& m, const PathConfig& cfg, const std::function<double(double)>& V,
                            const std::function<double(double)>& phi, double x, double t);

/// Linear interpolant of a periodic grid field (the solver's torus).
std::function<double(double)> periodic_interpolant(const Grid1D& g, std::vector<double> field);

/// Model with nu flattened to its supremum on s/4 <= |x| <= s.
LevyModel modified_model(const LevyModel& m, double s);

struct SigmaMass {
  double total = 0;  ///< |sigma| = nu^s - nu integrated
  double sup = 0;
};
SigmaMass sigma_mass(const LevyModel& m, double s);

struct DominationRow {
  double t = 0;
  double lower_margin = 0;  ///< min of p2 - e^{-|sigma| t} p1
  double upper_margin = 0;  ///< min of e^{-|sigma| t} p1 + t sup sigma - p2
  double worst_x_lower = 0, worst_x_upper = 0;
  bool pass = false;
};
struct DominationReport {
  double s = 0;
  SigmaMass sigma;
  std::vector<DominationRow> rows;
  double tol = 1e-8;
  /// Potential-kernel ordering G^eta_1 <= G^{eta - |sigma|}_2 at sampled x, eta = 2 |sigma|.
  std::vector<double> kernel_x, kernel_g1, kernel_g2;
  bool kernel_pass = false;
  bool pass = false;
};
DominationReport domination_check(const LevyModel& m, double s, const std::vector<double>& t_set, double x_max = 40.0,
                                  double tol = 1e-8);

/// Resolvent kernel \int_0^inf e^{-eta t} p(t, x) dt for d = 1.
double potential_kernel(const LevyModel& m, double eta, double x);
std::vector<double> potential_kernel(const LevyModel& m, double eta, const std::vector<double>& xs);

struct IkedaWatanabeReport {
  double x0 = 0, eta = 0, a = 0, b = 0;
  MeanEstimate mc;
  double quadrature = 0;
  double rel_diff = 0;
  bool pass = false;
};
/// E^x0[e^{-eta tau_D} 1_{[a,b]}(X_{tau_D})] with D = B(x0, 1): Monte Carlo against the killed-propagator
/// quadrature \int_D G_D^eta(x0, y) \int_a^b nu(z - y) dz dy (d = 1).
IkedaWatanabeReport ikeda_watanabe_probe(const LevyModel& m, const PathConfig& cfg, double x0, double eta, double a,
                                         double b);

struct GreenEstimate {
  double s = 0, separation = 0;
  double sup = 0, ci_halfwidth = 0;
  double at_x = 0, at_y = 0;
};
/// Occupation-density estimate of sup G_{B(0,s)}(x, y) over |x - y| >= separation (d = 1).
GreenEstimate green_sup_mc(const LevyModel& m, const PathConfig& cfg, double s, double separation, int starts = 5,
                           double bin = 0.25);

/// Runs `fn(chunk, begin, end, acc)` over all chunks on the worker pool; results are in chunk order.
template <class Acc>
std::vector<Acc> run_chunks(long n_paths, int workers, const std::function<void(long, long, long, Acc&)>& fn);

}  // namespace levy

#include "levy/detail/chunks.hpp"
