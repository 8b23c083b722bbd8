#pragma once

#include <vector>

#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"

namespace greenwalk {

enum class MetricKind { word, green };

/**
 * Distance-to-identity evaluator usable at any scale (including points far
 * outside every precomputed table).
 *
 * word  : works on every spec. On word kinds it is a per-letter cost sum
 *         (cost 1, or the syllable weight for free products).
 * green : the Green word metric -log(G(x,y)/G(e,e)). It is served exactly
 *         for nearest-neighbour measures on free groups, where -log F is
 *         additive along tree geodesics with per-letter costs
 *         c_s = -log F(e, s) from the first-passage fixed point. Anything
 *         else raises CapabilityError (truncated tables stay the ball-scale
 *         route; see green.hpp).
 */
struct Metric {
  MetricKind kind = MetricKind::word;
  GroupSpec spec;
  std::vector<double> letter_cost; // empty means "use word_length directly"

  double dist0(const GroupElement& g) const;
  double dist(const GroupElement& a, const GroupElement& b) const;
  bool has_letter_costs() const { return !letter_cost.empty(); }
};

Metric word_metric(const GroupSpec& spec);
Metric green_word_metric(const GroupSpec& spec, const StepDistribution& mu);

} // namespace greenwalk
