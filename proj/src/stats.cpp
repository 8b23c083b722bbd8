#include "greenwalk/stats.hpp"

#include <algorithm>
#include <cmath>

#include "greenwalk/errors.hpp"
#include "greenwalk/rng.hpp"

namespace greenwalk {

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) throw StatisticalError("mean of an empty sample");
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw StatisticalError("variance needs at least two samples");
  const double m = sample_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double acc = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    acc += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

KsResult ks_test_gaussian(std::vector<double> samples, double mean, double variance) {
  const std::size_t n = samples.size();
  if (n < 8) throw StatisticalError("KS test needs at least 8 samples");
  if (!(variance > 0.0)) throw StatisticalError("KS reference variance must be positive");
  std::sort(samples.begin(), samples.end());
  const double sd = std::sqrt(variance);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = normal_cdf((samples[i] - mean) / sd);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    d = std::max(d, std::max(f - lo, hi - f));
  }
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d; // Stephens correction
  KsResult res;
  res.statistic = d;
  res.p_value = kolmogorov_q(lambda);
  return res;
}

std::vector<double> gaussian_samples(std::size_t n, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(n);
  SplitRng rng = SplitRng::derive(seed, 0x676175ULL);
  while (out.size() < n) {
    // Box-Muller; nudge u1 away from zero so the log is finite
    const double u1 = std::max(rng.unit(), 0x1.0p-53);
    const double u2 = rng.unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out.push_back(r * std::cos(2.0 * M_PI * u2));
    if (out.size() < n) out.push_back(r * std::sin(2.0 * M_PI * u2));
  }
  return out;
}

} // namespace greenwalk
