#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/windex.hpp"

namespace greenwalk {

/**
 * Truncated Green kernel G_N(e, x) = sum_{n=0..N} mu^{*n}(x) on a ball.
 *
 * values are certified inside |x| <= report_radius; the convolutions run on
 * a strictly larger internal_radius ball so that truncation at the internal
 * boundary cannot contaminate the reported band. Mass stepping outside the
 * internal ball is dropped and accounted per step in `leaked` (exact on
 * trees: along one support word the length path is V-shaped, so a path
 * leaves the ball iff one of its letter steps does).
 */
struct GreenTable {
  GroupSpec spec;
  StepDistribution mu;
  int truncation = 0;
  int report_radius = 0;
  int internal_radius = 0;

  // free-group fast path: flat array over a FreeWordIndex
  std::shared_ptr<FreeWordIndex> index;
  std::vector<double> values;

  // generic path (free products, small lamplighter balls)
  std::vector<GroupElement> elements;
  std::unordered_map<GroupElement, std::size_t, ElementHash> slot;
  std::vector<double> gvalues;

  std::vector<double> returns;  // mu^{*n}(e), n = 0..N
  std::vector<double> leaked;   // mass lost at the internal boundary per step
  double rho_hat = 0.0;         // fitted decay rate of the return sequence
  double tail_bound = 0.0;      // bound on G(e,e) - G_N(e,e) from the fit

  double gee() const;
  /// G_N(e, x); CapabilityError outside the certified ball.
  double at(const GroupElement& x) const;
  bool has_index() const { return static_cast<bool>(index); }
};

/**
 * Builds the table. internal_radius < 0 picks report_radius + 7 shrunk to
 * the support cap (ResourceError if even a 2-letter margin does not fit).
 * tol > 0 additionally requires tail_bound <= tol (AccuracyError otherwise).
 */
GreenTable green_kernel(const GroupSpec& spec, const StepDistribution& mu,
                        int truncation, int report_radius,
                        int internal_radius = -1, double tol = 0.0,
                        std::size_t cap = kDefaultSupportCap);

/// First-passage probability F_N(e, target) within N steps (absorbing DP on
/// the same internal ball). F(e, e) = 1 by convention.
double first_passage(const GroupSpec& spec, const StepDistribution& mu,
                     const GroupElement& target, int truncation,
                     int internal_radius = -1, std::size_t cap = kDefaultSupportCap);

/// Green word metric from the table: log G(e,e) - log G_N(e, x^{-1} y).
double green_metric(const GreenTable& t, const GroupElement& x, const GroupElement& y);

struct QiFit {
  double slope;     // best multiplicative constant C (least squares, origin)
  double additive;  // smallest b making |d_G - C d_word| <= b on the ball
  std::size_t points;
};
/// Quasi-isometry comparison of d_G against the word metric on the
/// certified ball.
QiFit quasi_isometry_fit(const GreenTable& t);

/// Martin kernel K_y(x) = G(x, y) / G(e, y) read out of a table.
struct MartinView {
  const GreenTable* table = nullptr;
  GroupElement pole;
  double at(const GroupElement& x) const;
};
MartinView martin_kernel(const GreenTable& t, const GroupElement& y);

struct HilbertResult {
  double beta = 0.0;   // sup_z K_b(z) / K_a(z)
  double alpha = 0.0;  // inf_z K_b(z) / K_a(z)
  double distance = 0.0; // 0.5 * log(beta / alpha)
  GroupElement arg_sup, arg_inf;
};
/// Hilbert projective distance between two Martin kernels, the sup/inf taken
/// over the ball of radius z_radius.
HilbertResult hilbert_metric(const MartinView& a, const MartinView& b, int z_radius);

struct HilbertGreenPair {
  GroupElement x, y;
  double hilbert, green, deviation;
};
struct HilbertGreenReport {
  double max_deviation = 0.0;
  std::size_t pairs = 0;
  std::vector<HilbertGreenPair> worst; // few most deviating pairs, sorted
};
/// Sweeps all pairs x != y in ball(pair_radius) and compares the Hilbert
/// distance (sup/inf over ball(z_radius)) with the Green word metric, both
/// from one truncated kernel.
HilbertGreenReport verify_hilbert_green(const GroupSpec& spec, const StepDistribution& mu,
                                        int pair_radius, int z_radius, int truncation,
                                        int keep_worst = 8);

/**
 * Exact nearest-neighbour first-passage analysis on a free group: the
 * minimal solution of f_s = mu(s) + f_s * sum_{t != s} mu(t) f_t by monotone
 * fixed-point iteration from zero. Gives per-letter Green costs -log f_s,
 * U = sum mu(s) f_s and G(e,e) = 1/(1-U) to machine precision.
 */
struct NnGreenAnalysis {
  std::vector<double> f;     // F(e, s) per letter id
  std::vector<double> cost;  // -log f_s
  double total = 0.0;        // U
  double gee = 0.0;          // 1 / (1 - U)
  int iterations = 0;
  double residual = 0.0;
};
NnGreenAnalysis nn_first_passage(const GroupSpec& spec, const StepDistribution& mu,
                                 double tol = 1e-15, int max_iter = 200000);

} // namespace greenwalk
