#include "greenwalk/metric.hpp"

#include "greenwalk/errors.hpp"
#include "greenwalk/green.hpp"

namespace greenwalk {

double Metric::dist0(const GroupElement& g) const {
  if (!has_letter_costs()) return static_cast<double>(word_length(spec, g));
  double acc = 0.0;
  for (auto s : g.word) acc += letter_cost[static_cast<std::size_t>(s)];
  return acc;
}

double Metric::dist(const GroupElement& a, const GroupElement& b) const {
  return dist0(multiply(spec, inverse(spec, a), b));
}

Metric word_metric(const GroupSpec& spec) {
  Metric m;
  m.kind = MetricKind::word;
  m.spec = spec;
  if (spec.is_word_kind()) {
    m.letter_cost.resize(static_cast<std::size_t>(spec.letter_count()));
    for (int s = 0; s < spec.letter_count(); ++s)
      m.letter_cost[static_cast<std::size_t>(s)] = static_cast<double>(spec.letter_weight(s));
  }
  return m;
}

Metric green_word_metric(const GroupSpec& spec, const StepDistribution& mu) {
  if (!spec.is_free())
    throw CapabilityError("the Green word metric at trajectory scale is served "
                          "on free groups only (per-letter Green costs need a tree)");
  if (!mu.nearest_neighbour())
    throw CapabilityError("the Green word metric at trajectory scale needs a "
                          "nearest-neighbour measure; use truncated kernel "
                          "tables for finite-range supports");
  const NnGreenAnalysis nn = nn_first_passage(spec, mu);
  Metric m;
  m.kind = MetricKind::green;
  m.spec = spec;
  m.letter_cost = nn.cost;
  return m;
}

} // namespace greenwalk
