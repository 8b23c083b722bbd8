#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "greenwalk/group.hpp"

namespace greenwalk {

inline constexpr std::size_t kDefaultSupportCap = 5'000'000;

/**
 * A finitely supported step distribution. Support elements are kept in the
 * canonical element order and weights are normalized to sum to one; both are
 * enforced at construction so every downstream consumer (samplers, reports,
 * convolutions) sees the same deterministic layout.
 */
struct StepDistribution {
  GroupSpec spec;
  std::vector<GroupElement> support;
  std::vector<double> weight;

  std::size_t size() const { return support.size(); }
  double mass_of(const GroupElement& g) const;
  /// Longest word length over the support (the horizon L of one step).
  int max_word_length() const;
  /// True when the support consists of single letters only.
  bool nearest_neighbour() const;
};

/// Uniform measure on the standard generators (the simple random walk).
StepDistribution uniform_generator_measure(const GroupSpec& spec);

/// Measure from (word, weight) pairs; words are parsed with parse_element.
/// Weights must be positive and are normalized; repeated words are rejected.
StepDistribution measure_from_pairs(
    const GroupSpec& spec, const std::vector<std::pair<std::string, double>>& pairs);

bool is_symmetric(const StepDistribution& mu, double tol = 1e-12);

/// Heuristic non-elementarity check: the support must contain two
/// non-commuting elements (enough to rule out measures stuck on a single
/// geodesic in the groups served here).
bool is_nonelementary(const StepDistribution& mu);

/// Throws ConfigError when a requirement fails.
void require_admissible(const StepDistribution& mu, bool need_symmetric,
                        bool need_nonelementary);

using ElementDist = std::unordered_map<GroupElement, double, ElementHash>;

ElementDist dirac_identity();

/// One convolution step d * mu. Throws ResourceError past `cap` support points.
ElementDist convolve(const GroupSpec& spec, const ElementDist& d,
                     const StepDistribution& mu, std::size_t cap = kDefaultSupportCap);

/// mu^{*n} by repeated convolution (n >= 0).
ElementDist convolution_power(const GroupSpec& spec, const StepDistribution& mu,
                              int n, std::size_t cap = kDefaultSupportCap);

double mass_at(const ElementDist& d, const GroupElement& g);

/// sum_g mu(g) exp(beta * dist0(g)); finite support, so always finite.
double exponential_moment(const StepDistribution& mu,
                          const std::function<double(const GroupElement&)>& dist0,
                          double beta);

} // namespace greenwalk
