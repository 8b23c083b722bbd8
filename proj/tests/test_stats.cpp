#include <doctest.h>

#include <cmath>
#include <vector>

#include "greenwalk/errors.hpp"
#include "greenwalk/stats.hpp"

using namespace greenwalk;

TEST_CASE("sample moments on a hand-checked vector") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(sample_mean(v) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(sample_variance(v) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(sample_mean({}), StatisticalError);
  CHECK_THROWS_AS(sample_variance({1.0}), StatisticalError);
}

TEST_CASE("the normal CDF hits its table values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(normal_cdf(6.0) > 1.0 - 1e-8);
}

TEST_CASE("the Kolmogorov tail sums its alternating series") {
  // Q(1) = 2 (e^{-2} - e^{-8} + e^{-18} - ...) computed right here
  double ref = 0.0;
  for (int k = 1; k <= 12; ++k)
    ref += (k % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * k * k);
  CHECK(kolmogorov_q(1.0) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735355).epsilon(1e-9));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(0.05) >= 1.0 - 1e-12); // essentially certain acceptance
  CHECK(kolmogorov_q(0.05) <= 1.0);
  CHECK(kolmogorov_q(5.0) < 1e-20);
  CHECK(kolmogorov_q(0.5) > kolmogorov_q(1.0));
}

TEST_CASE("deterministic Gaussian sampling is reproducible and calibrated") {
  const std::vector<double> a = gaussian_samples(4096, 7);
  const std::vector<double> b = gaussian_samples(4096, 7);
  const std::vector<double> c = gaussian_samples(4096, 8);
  CHECK(a == b);
  CHECK(a != c);
  const std::vector<double> big = gaussian_samples(20000, 123);
  CHECK(std::abs(sample_mean(big)) <= 0.02);
  CHECK(sample_variance(big) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("the KS test accepts true nulls across seeds") {
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const KsResult r = ks_test_gaussian(gaussian_samples(500, seed), 0.0, 1.0);
    CHECK(r.p_value > 1e-6);
    if (r.p_value > 0.01) ++pass;
  }
  CHECK(pass >= 19);

  // location/scale parameters are honored
  std::vector<double> shifted = gaussian_samples(1000, 42);
  for (double& x : shifted) x = 3.0 + 2.0 * x;
  CHECK(ks_test_gaussian(shifted, 3.0, 4.0).p_value > 0.01);
}

TEST_CASE("the KS test rejects wrong variance and wrong mean") {
  std::vector<double> wide = gaussian_samples(2000, 5);
  for (double& x : wide) x *= std::sqrt(1.5);
  CHECK(ks_test_gaussian(wide, 0.0, 1.0).p_value < 1e-3);

  std::vector<double> shifted = gaussian_samples(2000, 6);
  for (double& x : shifted) x += 0.2;
  CHECK(ks_test_gaussian(shifted, 0.0, 1.0).p_value < 1e-3);
}

TEST_CASE("KS input validation") {
  CHECK_THROWS_AS(ks_test_gaussian({}, 0.0, 1.0), StatisticalError);
  CHECK_THROWS_AS(ks_test_gaussian({1, 2, 3, 4, 5, 6, 7}, 0.0, 1.0), StatisticalError);
  CHECK_THROWS_AS(ks_test_gaussian(gaussian_samples(100, 1), 0.0, -1.0),
                  StatisticalError);
}
