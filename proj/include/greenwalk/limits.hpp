#pragma once

#include <cstdint>
#include <vector>

#include "greenwalk/cylinder.hpp"
#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/metric.hpp"
#include "greenwalk/stats.hpp"

namespace greenwalk {

struct DriftReport {
  double drift = 0.0;   // mean of d(e, Z_n)/n over trajectories
  double ci95 = 0.0;
  double stddev = 0.0;  // of d/n across trajectories
  long n = 0;
  long trajectories = 0;
  std::vector<long> checkpoint_ns;
  std::vector<double> checkpoint_means;
  double fitted_exponent = 0.0; // log-log slope of the checkpoint means
  bool sublinear = false;       // exponent below 0.9: escape is not ballistic
};
DriftReport estimate_drift(const GroupSpec& spec, const StepDistribution& mu,
                           const Metric& metric, long n, long trajectories,
                           std::uint64_t seed, int threads = 0);

/// Exact drift from the stationary measure: integral of the mean cocycle
/// increment, A = sum_w nu(w) sum_g mu(g) h_w(g). nu must reach depth L.
double drift_formula(const GroupSpec& spec, const StepDistribution& mu,
                     const Metric& metric, const StationaryMeasure& nu);

struct CltReport {
  long n = 0;
  long trajectories = 0;
  double center_drift = 0.0;
  double sigma2_ref = 0.0;
  std::vector<double> samples; // (d(e, Z_n) - n A) / sqrt(n)
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  KsResult ks;
};
CltReport clt_experiment(const GroupSpec& spec, const StepDistribution& mu,
                         const Metric& metric, long n, long trajectories,
                         double center_drift, double sigma2_ref,
                         std::uint64_t seed, int threads = 0);

struct LilSeedTrace {
  std::vector<double> stat_sqrt2; // (d - nA) / (sigma sqrt(2 n loglog n))
  std::vector<double> stat_sqrt1; // (d - nA) / (sigma sqrt(n loglog n))
  double running_max_sqrt2 = 0.0; // max |stat_sqrt2| over checkpoints
  double running_max_sqrt1 = 0.0;
};
struct LilReport {
  std::vector<long> checkpoints;
  std::vector<LilSeedTrace> seeds;
  double ensemble_max_sqrt2 = 0.0; // max over seeds of running_max_sqrt2
  double min_seed_max_sqrt2 = 0.0; // min over seeds (lower envelopes are
                                   // only meaningful at the ensemble level)
  bool centering_suspect = false;  // statistic drifting off to infinity
};
LilReport lil_experiment(const GroupSpec& spec, const StepDistribution& mu,
                         const Metric& metric, long n_max, long n_min,
                         int n_checkpoints, int seeds, double center_drift,
                         double sigma2, std::uint64_t seed0, int threads = 0);

/// Pure recomputation of one seed's LIL trace from checkpoint distances
/// (used to probe wrong centering without re-running walks).
LilSeedTrace lil_statistics(const std::vector<long>& checkpoints,
                            const std::vector<double>& distances,
                            double center_drift, double sigma2);

struct MartingaleBin {
  std::vector<std::int16_t> word;
  long count = 0;
  double mean = 0.0;
  double se = 0.0;
  double tstat = 0.0;
};
struct MartingaleReport {
  std::vector<MartingaleBin> bins;
  double max_abs_t = 0.0;
  long samples = 0;
  int bin_depth = 0;
  double increment_bound = 0.0; // max |F| observed (for Lindeberg profiles)
};
/**
 * Conditional-mean test of the martingale increments
 * F_k = h_eta(g_k) - A + u(g_k^-1 eta | m) - u(eta | m) along walks against a
 * fixed deep boundary point, binned by the current eta-prefix at bin_depth.
 */
MartingaleReport martingale_experiment(const GroupSpec& spec, const StepDistribution& mu,
                                       const Metric& metric, const CylinderFunction& u,
                                       double center_drift, long trajectories,
                                       long steps, int bin_depth, long burnin,
                                       std::uint64_t seed, int threads = 0);

struct LindebergReport {
  double bound = 0.0;
  std::vector<double> eps;
  std::vector<long> ns;
  // fraction of increments with |F| > eps sqrt(n), one row per eps
  std::vector<std::vector<double>> tail_fraction;
  std::vector<long> crossover_n; // first grid n with empty tail, per eps
};
/// Lindeberg profile for uniformly bounded increments: tails vanish once
/// n > (bound/eps)^2; reported from observed increments.
LindebergReport lindeberg_profile(const std::vector<double>& increments,
                                  const std::vector<double>& eps_grid,
                                  const std::vector<long>& n_grid);

struct GrowthReport {
  std::vector<long> ns;
  std::vector<double> means;
  double exponent = 0.0;
  double intercept = 0.0;
  long trajectories = 0;
};
/// Mean displacement growth exponent by log-log fit (lamplighter scaling).
GrowthReport growth_exponent(const GroupSpec& spec, const StepDistribution& mu,
                             const std::vector<long>& ns, long trajectories,
                             std::uint64_t seed, int threads = 0);

struct PositivityReport {
  int depth = 0;
  std::vector<std::vector<std::int16_t>> cells;
  std::vector<long> counts;
  std::vector<double> means; // E[d(e,Z_n)/n | prefix cell], skipping thin cells
  double min_mean = 0.0;
  bool positive = false;
  long trajectories = 0;
};
/// Drift positivity conditioned on the limiting direction: walks are bucketed
/// by prefix_m(Z_n) and each bucket's mean speed must stay positive.
PositivityReport drift_positivity(const GroupSpec& spec, const StepDistribution& mu,
                                  const Metric& metric, int depth, long n,
                                  long trajectories, std::uint64_t seed, int threads = 0);

} // namespace greenwalk
