#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/metric.hpp"

namespace greenwalk {

/**
 * A boundary point of the free-group tree, represented by a long reduced
 * prefix of a geodesic ray from the identity. depth() bounds which
 * computations are trustworthy; every operation that would need to look past
 * the stored digits raises PrecisionError instead of guessing.
 */
struct BoundaryPoint {
  std::vector<std::int16_t> digits;

  int depth() const { return static_cast<int>(digits.size()); }

  /// Repeats a reduced pattern out to `depth` digits. The pattern must stay
  /// reduced under concatenation with itself (ConfigError otherwise).
  static BoundaryPoint periodic(const GroupSpec& spec,
                                const std::vector<std::int16_t>& pattern, int depth);
  static BoundaryPoint from_word(const GroupSpec& spec, const std::string& dotted,
                                 int repeat_to_depth = 0);
  std::string format(const GroupSpec& spec) const;
};

/// Longest common prefix, in letters.
long common_prefix(const BoundaryPoint& a, const BoundaryPoint& b);

/// 2 * (x, y)_base for elements of a word kind under the word metric
/// (doubled to stay integral).
long gromov2_elements(const GroupSpec& spec, const GroupElement& x,
                      const GroupElement& y, const GroupElement& base);

/// 2 * (xi, eta)_e for boundary points: twice the common prefix length.
/// PrecisionError when the stored digits cannot separate the two points.
long gromov2_boundary(const BoundaryPoint& xi, const BoundaryPoint& eta);

/// Horofunction h_xi(x) = d(x, p) - d(e, p) for a deep anchor p on the ray:
/// |x| - 2 * cpl(x, xi) in the word metric. Needs depth >= |x|.
long horofunction(const GroupSpec& spec, const BoundaryPoint& xi, const GroupElement& x);

/// Same combinatorics with per-letter costs (e.g. the Green word metric).
double horofunction_weighted(const GroupSpec& spec, const BoundaryPoint& xi,
                             const GroupElement& x, const Metric& metric);

struct BoundaryActionResult {
  BoundaryPoint image;  // g . xi, with depth reduced by the cancellation
  long busemann;        // h_xi(g^{-1}), so h_{g xi}(y) = h_xi(g^{-1} y) - busemann
};
BoundaryActionResult boundary_action(const GroupSpec& spec, const GroupElement& g,
                                     const BoundaryPoint& xi);

/**
 * One probe of the boundary cocycle identity, all quantities doubled so that
 * word-metric cases stay exact integers:
 *   lhs2   = 2 (xi,eta)_e - 2 (g^-1 xi, g^-1 eta)_e
 *   mine2  = -(h_xi(g) + h_eta(g))         [the implemented identity]
 *   quoted2 = 4 (h_xi(g) + h_eta(g))        [a commonly quoted factor-2 variant]
 */
struct CocycleCase {
  long lhs2 = 0, mine2 = 0, quoted2 = 0;
  bool match_mine = false, match_quoted = false;
};
CocycleCase cocycle_case(const GroupSpec& spec, const GroupElement& g,
                         const BoundaryPoint& xi, const BoundaryPoint& eta);

struct DeltaReport {
  double delta = 0.0;
  std::size_t points = 0;
  std::uint64_t tuples = 0;
  bool exact_zero = false; // integer arithmetic path found delta == 0 exactly
};

/// Four-point hyperbolicity constant over a point set, full scan:
/// max over (x,y,z,base) of min((x,z)_b, (z,y)_b) - (x,y)_b.
/// The word-metric variant runs in doubled integers and is exact.
DeltaReport hyperbolicity_delta_word(const GroupSpec& spec,
                                     const std::vector<GroupElement>& points,
                                     int threads = 0);
DeltaReport hyperbolicity_delta(const GroupSpec& spec,
                                const std::vector<GroupElement>& points,
                                const std::function<double(const GroupElement&,
                                                           const GroupElement&)>& dist,
                                int threads = 0);

struct RayReport {
  std::vector<std::int16_t> prefix; // first m digits of Z_n
  long first_stable_step = -1;      // step after which the prefix never moved
  bool stabilized = false;
  long final_length = 0;
};
/// Tracks prefix stabilization of one walk trajectory out to n steps.
RayReport ray_convergence(const GroupSpec& spec, const StepDistribution& mu,
                          long n, int prefix_depth, std::uint64_t seed,
                          std::uint64_t trajectory);

struct BusemannTrace {
  std::vector<long> checkpoints;
  std::vector<long> horo;     // h_xi(Z_k) against the walk's own limit prefix
  std::vector<long> minus_d;  // -d(e, Z_k)
};
/// Runs one walk to n, takes xi = the final prefix, and traces h_xi(Z_k)
/// against -|Z_k| along the way (they agree once the ray is entered).
BusemannTrace busemann_vs_distance(const GroupSpec& spec, const StepDistribution& mu,
                                   long n, std::uint64_t seed, std::uint64_t trajectory);

} // namespace greenwalk
