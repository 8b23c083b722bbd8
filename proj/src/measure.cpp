#include "greenwalk/measure.hpp"

#include <algorithm>
#include <cmath>

#include "greenwalk/errors.hpp"

namespace greenwalk {

double StepDistribution::mass_of(const GroupElement& g) const {
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] == g) return weight[i];
  return 0.0;
}

int StepDistribution::max_word_length() const {
  long m = 0;
  for (const auto& g : support) m = std::max(m, word_length(spec, g));
  return static_cast<int>(m);
}

bool StepDistribution::nearest_neighbour() const {
  for (const auto& g : support)
    if (word_length(spec, g) != 1) return false;
  return true;
}

namespace {

StepDistribution finalize(GroupSpec spec, std::vector<GroupElement> support,
                          std::vector<double> weight) {
  double total = 0.0;
  for (double w : weight) {
    if (!(w > 0.0)) throw ConfigError("measure weights must be positive");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("measure has no mass");
  for (double& w : weight) w /= total;

  // canonical deterministic order
  std::vector<std::size_t> perm(support.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return element_less(spec, support[a], support[b]);
  });
  StepDistribution mu;
  mu.spec = std::move(spec);
  mu.support.reserve(support.size());
  mu.weight.reserve(weight.size());
  for (std::size_t i : perm) {
    mu.support.push_back(std::move(support[i]));
    mu.weight.push_back(weight[i]);
  }
  for (std::size_t i = 1; i < mu.support.size(); ++i)
    if (mu.support[i] == mu.support[i - 1])
      throw ConfigError("repeated word in measure support: " +
                        format_element(mu.spec, mu.support[i]));
  return mu;
}

} // namespace

StepDistribution uniform_generator_measure(const GroupSpec& spec) {
  std::vector<GroupElement> support;
  for (int s : spec.generator_letters())
    support.push_back(from_letters(spec, {s}));
  std::vector<double> weight(support.size(), 1.0);
  return finalize(spec, std::move(support), std::move(weight));
}

StepDistribution measure_from_pairs(
    const GroupSpec& spec, const std::vector<std::pair<std::string, double>>& pairs) {
  if (pairs.empty()) throw ConfigError("measure needs at least one support word");
  std::vector<GroupElement> support;
  std::vector<double> weight;
  for (const auto& [word, w] : pairs) {
    GroupElement g = parse_element(spec, word);
    if (is_identity(g) && pairs.size() == 1)
      throw ConfigError("measure concentrated on the identity");
    support.push_back(std::move(g));
    weight.push_back(w);
  }
  return finalize(spec, std::move(support), std::move(weight));
}

bool is_symmetric(const StepDistribution& mu, double tol) {
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    const GroupElement inv = inverse(mu.spec, mu.support[i]);
    if (std::abs(mu.mass_of(inv) - mu.weight[i]) > tol) return false;
  }
  return true;
}

bool is_nonelementary(const StepDistribution& mu) {
  for (std::size_t i = 0; i < mu.support.size(); ++i) {
    if (is_identity(mu.support[i])) continue;
    for (std::size_t j = i + 1; j < mu.support.size(); ++j) {
      if (is_identity(mu.support[j])) continue;
      if (mu.support[j] == inverse(mu.spec, mu.support[i])) continue;
      if (!commutes(mu.spec, mu.support[i], mu.support[j])) return true;
    }
  }
  return false;
}

void require_admissible(const StepDistribution& mu, bool need_symmetric,
                        bool need_nonelementary) {
  if (need_symmetric && !is_symmetric(mu))
    throw ConfigError("measure must be symmetric (mu(g) == mu(g^-1))");
  if (need_nonelementary && !is_nonelementary(mu))
    throw ConfigError("measure is elementary: its support generates a "
                      "commutative (or trivial) subgroup");
}

ElementDist dirac_identity() {
  ElementDist d;
  d.emplace(identity_element(), 1.0);
  return d;
}

ElementDist convolve(const GroupSpec& spec, const ElementDist& d,
                     const StepDistribution& mu, std::size_t cap) {
  ElementDist out;
  out.reserve(d.size() * 2);
  for (const auto& [x, wx] : d) {
    for (std::size_t j = 0; j < mu.support.size(); ++j) {
      GroupElement y = multiply(spec, x, mu.support[j]);
      out[std::move(y)] += wx * mu.weight[j];
      if (out.size() > cap)
        throw ResourceError("convolution support exceeds the cap of " +
                            std::to_string(cap) + " elements");
    }
  }
  return out;
}

ElementDist convolution_power(const GroupSpec& spec, const StepDistribution& mu,
                              int n, std::size_t cap) {
  if (n < 0) throw ConfigError("convolution power must be >= 0");
  ElementDist d = dirac_identity();
  for (int i = 0; i < n; ++i) d = convolve(spec, d, mu, cap);
  return d;
}

double mass_at(const ElementDist& d, const GroupElement& g) {
  const auto it = d.find(g);
  return it == d.end() ? 0.0 : it->second;
}

double exponential_moment(const StepDistribution& mu,
                          const std::function<double(const GroupElement&)>& dist0,
                          double beta) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.support.size(); ++i)
    acc += mu.weight[i] * std::exp(beta * dist0(mu.support[i]));
  return acc;
}

} // namespace greenwalk
