#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/metric.hpp"
#include "greenwalk/rng.hpp"
#include "greenwalk/windex.hpp"

namespace greenwalk {

/**
 * Cylinder basis at depth m on a free-group boundary: one cell per reduced
 * word of length exactly m, indexed through a FreeWordIndex level.
 */
class CylinderBasis {
public:
  CylinderBasis(const GroupSpec& spec, int depth);

  const GroupSpec& spec() const { return spec_; }
  int depth() const { return depth_; }
  std::size_t count() const { return idx_->level_count(depth_); }
  const FreeWordIndex& index() const { return *idx_; }

  std::size_t cell_of(const std::int16_t* word, std::size_t len) const;
  std::size_t cell_of(const std::vector<std::int16_t>& word) const;
  std::vector<std::int16_t> word_of(std::size_t cell) const;

private:
  GroupSpec spec_;
  int depth_;
  std::shared_ptr<FreeWordIndex> idx_;
};

/// A function that only depends on the first depth() letters of a ray.
struct CylinderFunction {
  std::shared_ptr<CylinderBasis> basis;
  std::vector<double> values;

  int depth() const { return basis ? basis->depth() : 0; }
  double sup_norm() const;
};

CylinderFunction make_cylinder_function(const GroupSpec& spec, int depth,
                                        std::vector<double> values = {});

/**
 * Cylinder marginals of a boundary measure, exact down to level `depth`.
 * level_mass[l] lists the masses of all level-l cylinders in index order.
 * Rays can be extended past `depth` with the measure's own deepest Markov
 * conditionals (exact for nearest-neighbour harmonic measures).
 */
struct StationaryMeasure {
  GroupSpec spec;
  int depth = 0;
  std::vector<std::vector<double>> level_mass;
  std::shared_ptr<FreeWordIndex> idx;
  double residual = 0.0;
  int iterations = 0;
  std::string source; // "solved" or "empirical"

  double mass_prefix(const std::int16_t* word, std::size_t len) const;
  double mass_prefix(const std::vector<std::int16_t>& word) const;
  double integrate(const CylinderFunction& phi) const;
  std::vector<std::int16_t> sample_ray(int target_depth, SplitRng& rng) const;
};

/**
 * Stationary (harmonic) cylinder measure nu = mu * nu by power iteration.
 * Internally works at depth W = max(m + L, 2L + 1): the push-forward
 * sum_g mu(g) nu(g^-1 [w]) is exact down from W to W - L, and the measure is
 * re-extended to W with its own order-(W-L-1) conditionals. The residual is
 * the total-variation stationarity defect at depth m.
 */
StationaryMeasure solve_stationary(const GroupSpec& spec, const StepDistribution& mu,
                                   int m, double tol = 1e-12, int max_iter = 50000);

/// Empirical harmonic measure from walk rays (prefix of Z_steps at depth m).
StationaryMeasure empirical_stationary(const GroupSpec& spec, const StepDistribution& mu,
                                       int m, long rays, long steps,
                                       std::uint64_t seed, int threads = 0);

/// Total variation distance between two cylinder measures at a common depth.
double tv_distance(const StationaryMeasure& a, const StationaryMeasure& b, int depth);

/// Transfer operator (P phi)(xi) = sum_g mu(g) phi(g^-1 xi). Output depends
/// on depth m + L letters, so the result lives at that deeper level.
CylinderFunction apply_transfer(const GroupSpec& spec, const StepDistribution& mu,
                                const CylinderFunction& phi);

/// nu-conditional projection onto depth-m cylinders (averages descendants).
CylinderFunction project_to_depth(const CylinderFunction& phi,
                                  const StationaryMeasure& nu, int m);

/// One step of the depth-m discretized operator P_m = project ∘ apply.
CylinderFunction transfer_step(const GroupSpec& spec, const StepDistribution& mu,
                               const StationaryMeasure& nu, const CylinderFunction& phi);

/**
 * Centered one-step increment of the metric cocycle as a cylinder function:
 * psi(w) = sum_g mu(g) h_w(g) - drift, at depth m >= L. `drift` defaults
 * (NaN) to the exact nu-mean, making psi mean-zero to machine precision.
 */
CylinderFunction psi_increment(const GroupSpec& spec, const StepDistribution& mu,
                               const Metric& metric, const StationaryMeasure& nu,
                               int m, double drift);

double holder_seminorm(const CylinderFunction& phi, double alpha);

struct PoissonSolution {
  CylinderFunction u;
  double residual = 0.0;        // ||u - P_m u - psi||_inf at depth m
  double lifted_residual = 0.0; // ||lift(u) - P u - lift(psi)||_inf at m + L
  int terms = 0;
  std::vector<double> term_norms;
  double tau_run = 0.0;         // contraction rate observed while summing
};

/**
 * Solves (I - P_m) u = psi by the Neumann series u = sum_k P_m^k psi.
 * psi must be nu-mean-zero (NumericError otherwise); a persistent term-norm
 * ratio >= 1 raises SpectralError. The reported residual is the depth-m
 * equation defect; the lifted residual at depth m + L carries the
 * irreducible projection error and is diagnostic only.
 */
PoissonSolution solve_poisson(const GroupSpec& spec, const StepDistribution& mu,
                              const StationaryMeasure& nu, const CylinderFunction& psi,
                              double tol = 1e-8, int max_terms = 10000);

struct SpectralReport {
  double tau_hat = 0.0;
  std::vector<double> norms;
  std::vector<double> ratios;
  int iterations = 0;
};
/// Contraction rate of P_m on mean-zero functions by power iteration from a
/// deterministic pseudo-random start.
SpectralReport transfer_contraction(const GroupSpec& spec, const StepDistribution& mu,
                                    const StationaryMeasure& nu, int m, int iterations,
                                    std::uint64_t seed);

/**
 * Green-Kubo variance of the drift CLT: the second moment of the martingale
 * increment h_xi(g) - drift + u(g^-1 xi) - u(xi) under mu x nu, evaluated
 * exactly on depth-(m + L) cylinders (nu must be that deep).
 * drift = NaN uses the exact nu-mean.
 */
double sigma2_green_kubo(const GroupSpec& spec, const StepDistribution& mu,
                         const Metric& metric, const StationaryMeasure& nu,
                         const CylinderFunction& u, double drift);

struct ProximalityReport {
  double sup_integral = 0.0;
  std::vector<double> integrals; // one per sampled boundary pair
  long pairs = 0;
  int steps = 0;
  double alpha = 0.0;
};
/**
 * Average contraction of the boundary action in the metric e^{-(xi,eta)}:
 * I_n(xi,eta) = sum_g mu^{*n}(g) exp(-alpha [ (g xi, g eta) - (xi, eta) ]).
 * Reports the sup over nu-sampled pairs; < 1 certifies proximality at rank n.
 */
ProximalityReport proximality_scan(const GroupSpec& spec, const StepDistribution& mu,
                                   const StationaryMeasure& nu, int steps, double alpha,
                                   long pairs, std::uint64_t seed);

namespace detail {
/// Neumann summation core, exposed for contraction-failure testing.
struct NeumannResult {
  std::vector<double> sum;
  int terms = 0;
  std::vector<double> term_norms;
  double tau_run = 0.0;
};
NeumannResult neumann_sum(const std::function<std::vector<double>(const std::vector<double>&)>& step,
                          std::vector<double> first, double tol, int max_terms);
} // namespace detail

} // namespace greenwalk
