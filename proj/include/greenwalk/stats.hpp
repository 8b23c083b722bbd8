#pragma once

#include <cstdint>
#include <vector>

namespace greenwalk {

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v); // unbiased, n-1

/// Standard normal CDF.
double normal_cdf(double z);

/// Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample KS test against N(mean, variance), asymptotic p-value with the
/// Stephens small-sample correction. StatisticalError for degenerate input.
KsResult ks_test_gaussian(std::vector<double> samples, double mean, double variance);

/// Deterministic N(0,1) samples (Box-Muller over the counter RNG); used by
/// the KS meta-calibration checks.
std::vector<double> gaussian_samples(std::size_t n, std::uint64_t seed);

} // namespace greenwalk
