#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "greenwalk/cylinder.hpp"
#include "greenwalk/errors.hpp"
#include "greenwalk/green.hpp"
#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/metric.hpp"
#include "greenwalk/rng.hpp"

using namespace greenwalk;

namespace {

const GroupSpec kF2 = GroupSpec::parse("free:2");

StepDistribution srw() { return uniform_generator_measure(kF2); }
StepDistribution biased() {
  return measure_from_pairs(kF2, {{"a", 3.0 / 8.0},
                                  {"a-", 3.0 / 8.0},
                                  {"b", 1.0 / 8.0},
                                  {"b-", 1.0 / 8.0}});
}

// Exact hitting probabilities of the biased nearest-neighbour walk, shared
// by several oracles below.
struct NnOracle {
  double fa, fb, pia, pib, ca, cb;
};
NnOracle nn_oracle() {
  const NnGreenAnalysis nn = nn_first_passage(kF2, biased());
  NnOracle o;
  o.fa = nn.f[0];
  o.fb = nn.f[2];
  o.pia = o.fa / (1.0 + o.fa);
  o.pib = o.fb / (1.0 + o.fb);
  o.ca = nn.cost[0];
  o.cb = nn.cost[2];
  return o;
}

double letter_f(const NnOracle& o, std::int16_t letter) {
  return letter < 2 ? o.fa : o.fb;
}
double letter_pi(const NnOracle& o, std::int16_t letter) {
  return letter < 2 ? o.pia : o.pib;
}

// nu([w_1 ... w_m]) = f_{w_1} ... f_{w_{m-1}} * pi_{w_m} for a
// nearest-neighbour harmonic measure on the tree boundary.
double analytic_mass(const NnOracle& o, const std::vector<std::int16_t>& w) {
  double m = letter_pi(o, w.back());
  for (std::size_t i = 0; i + 1 < w.size(); ++i) m *= letter_f(o, w[i]);
  return m;
}

} // namespace

TEST_CASE("cylinder bases enumerate reduced words of one length") {
  CHECK(CylinderBasis(kF2, 1).count() == 4);
  CHECK(CylinderBasis(kF2, 2).count() == 12);
  CHECK(CylinderBasis(kF2, 5).count() == 324);
  const CylinderBasis basis(kF2, 3);
  for (std::size_t c = 0; c < basis.count(); ++c) {
    const auto w = basis.word_of(c);
    CHECK(w.size() == 3);
    CHECK(basis.cell_of(w) == c);
  }
  CHECK_THROWS_AS(basis.cell_of(std::vector<std::int16_t>{0, 1, 0}), ConfigError);
  CHECK_THROWS_AS(basis.cell_of(std::vector<std::int16_t>{0}), ConfigError);
}

TEST_CASE("the stationary measure of the simple walk is uniform on cylinders") {
  const StationaryMeasure nu1 = solve_stationary(kF2, srw(), 1);
  CHECK(nu1.source == "solved");
  CHECK(nu1.residual <= 1e-12);
  for (double m : nu1.level_mass[1]) CHECK(m == doctest::Approx(0.25).epsilon(1e-10));

  const StationaryMeasure nu2 = solve_stationary(kF2, srw(), 2);
  CHECK(nu2.residual <= 1e-12);
  REQUIRE(nu2.level_mass.size() >= 3);
  for (double m : nu2.level_mass[2]) CHECK(m == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
}

TEST_CASE("the biased stationary measure matches the first-passage formula") {
  const NnOracle o = nn_oracle();
  const StationaryMeasure nu = solve_stationary(kF2, biased(), 2);
  CHECK(nu.residual <= 1e-12);

  // depth 1: pi_s = f_s / (1 + f_s), an independently derived closed form
  CHECK(nu.mass_prefix(std::vector<std::int16_t>{0}) ==
        doctest::Approx(o.pia).epsilon(1e-10));
  CHECK(nu.mass_prefix(std::vector<std::int16_t>{2}) ==
        doctest::Approx(o.pib).epsilon(1e-10));
  CHECK(o.pia == doctest::Approx(0.329084541260166210).epsilon(1e-12));
  CHECK(o.pib == doctest::Approx(0.170915458739833790).epsilon(1e-12));

  // every depth-2 cell: nu([s t]) = f_s pi_t
  const CylinderBasis basis(kF2, 2);
  for (std::size_t c = 0; c < basis.count(); ++c) {
    const auto w = basis.word_of(c);
    CHECK(nu.mass_prefix(w) == doctest::Approx(analytic_mass(o, w)).epsilon(1e-9));
  }

  // a word deeper than the stored window is refused, not guessed
  CHECK_THROWS_AS(nu.mass_prefix(std::vector<std::int16_t>{0, 2, 0, 2}),
                  PrecisionError);

  // solving one level deeper keeps the depth-4 closed form exact
  const StationaryMeasure nu4 = solve_stationary(kF2, biased(), 3);
  CHECK(nu4.mass_prefix(std::vector<std::int16_t>{0, 2, 0, 2}) ==
        doctest::Approx(o.fa * o.fb * o.fa * o.pib).epsilon(1e-9));
  CHECK(nu4.mass_prefix(std::vector<std::int16_t>{2, 0, 0, 0}) ==
        doctest::Approx(o.fb * o.fa * o.fa * o.pia).epsilon(1e-9));
}

TEST_CASE("stationarity really is mu-invariance: integrals do not move") {
  SplitRng rng = SplitRng::derive(20240903, 1);
  for (const bool use_biased : {false, true}) {
    const StepDistribution mu = use_biased ? biased() : srw();
    const StationaryMeasure nu = solve_stationary(kF2, mu, 2);
    CylinderFunction phi = make_cylinder_function(kF2, 2);
    for (double& v : phi.values) v = rng.unit() * 2.0 - 1.0;
    const CylinderFunction pphi = apply_transfer(kF2, mu, phi);
    CHECK(nu.integrate(pphi) == doctest::Approx(nu.integrate(phi)).epsilon(1e-12));
  }
}

TEST_CASE("sampled rays reproduce the cylinder masses and their extensions") {
  const StationaryMeasure nu = solve_stationary(kF2, srw(), 2);
  SplitRng rng = SplitRng::derive(20240903, 2);
  const int rays = 20000;
  std::vector<int> first(4, 0);
  std::vector<int> depth3(36, 0);
  const CylinderBasis b3(kF2, 3);
  for (int i = 0; i < rays; ++i) {
    const auto w = nu.sample_ray(3, rng);
    REQUIRE(w.size() == 3);
    ++first[static_cast<std::size_t>(w[0])];
    ++depth3[b3.cell_of(w)];
  }
  for (int s = 0; s < 4; ++s)
    CHECK(static_cast<double>(first[static_cast<std::size_t>(s)]) / rays ==
          doctest::Approx(0.25).epsilon(0.08));
  for (int c = 0; c < 36; ++c)
    CHECK(static_cast<double>(depth3[static_cast<std::size_t>(c)]) / rays ==
          doctest::Approx(1.0 / 36.0).epsilon(0.25));
}

TEST_CASE("the empirical harmonic measure converges to the solved one") {
  const StationaryMeasure solved = solve_stationary(kF2, srw(), 1);
  const StationaryMeasure emp = empirical_stationary(kF2, srw(), 1, 20000, 200, 20240903);
  CHECK(emp.source == "empirical");
  CHECK(tv_distance(solved, emp, 1) <= 0.02);
  CHECK(tv_distance(solved, solved, 1) == 0.0);
  // rays too short to reach the cylinder depth are a statistical failure
  CHECK_THROWS_AS(empirical_stationary(kF2, srw(), 2, 500, 1, 20240903),
                  StatisticalError);
}

TEST_CASE("the transfer operator of the simple walk has the closed-form action") {
  // phi = indicator of the cylinder [a]; (P phi)(s t ...) has exactly two
  // contributions: prepend a (any s != a-), or cancel s and expose t = a
  CylinderFunction phi = make_cylinder_function(kF2, 1, {1.0, 0.0, 0.0, 0.0});
  const CylinderFunction p = apply_transfer(kF2, srw(), phi);
  REQUIRE(p.depth() == 2);
  const CylinderBasis b2(kF2, 2);
  for (std::size_t c = 0; c < b2.count(); ++c) {
    const auto w = b2.word_of(c);
    const double expect = 0.25 * (w[0] != 1 ? 1.0 : 0.0) + 0.25 * (w[1] == 0 ? 1.0 : 0.0);
    CHECK(p.values[c] == doctest::Approx(expect).epsilon(1e-14));
  }

  // conditional projection back to depth 1 under the uniform stationary law
  const StationaryMeasure nu = solve_stationary(kF2, srw(), 2);
  const CylinderFunction proj = project_to_depth(p, nu, 1);
  REQUIRE(proj.values.size() == 4);
  CHECK(proj.values[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-10)); // [a]
  CHECK(proj.values[1] == doctest::Approx(0.0).epsilon(1e-12));      // [a-]
  CHECK(proj.values[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(proj.values[3] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

  // the discretized operator fixes constants
  CylinderFunction c7 = make_cylinder_function(kF2, 2);
  for (double& v : c7.values) v = 0.7;
  const CylinderFunction pc = transfer_step(kF2, srw(), nu, c7);
  for (double v : pc.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("the centered cocycle increment matches its closed forms") {
  const StationaryMeasure nu_s = solve_stationary(kF2, srw(), 2);
  const Metric word = word_metric(kF2);
  const CylinderFunction psi_s =
      psi_increment(kF2, srw(), word, nu_s, 2, std::nan(""));
  for (double v : psi_s.values) CHECK(std::abs(v) <= 1e-15); // symmetry kills it

  const NnOracle o = nn_oracle();
  const StationaryMeasure nu_b = solve_stationary(kF2, biased(), 2);
  const double a_word = 2.0 * o.pia * 0.25 + 2.0 * o.pib * 0.75;
  CHECK(a_word == doctest::Approx(0.420915458739833790).epsilon(1e-12));
  const CylinderFunction psi_b =
      psi_increment(kF2, biased(), word, nu_b, 2, std::nan(""));
  const CylinderBasis b2(kF2, 2);
  for (std::size_t c = 0; c < b2.count(); ++c) {
    const auto w = b2.word_of(c);
    const double raw = w[0] < 2 ? 0.25 : 0.75;
    CHECK(psi_b.values[c] == doctest::Approx(raw - a_word).epsilon(1e-9));
  }
  CHECK(std::abs(nu_b.integrate(psi_b)) <= 1e-13);

  // Green word metric: the same structure with letter costs -log f
  const Metric green = green_word_metric(kF2, biased());
  const double a_green = 2.0 * o.pia * (o.cb / 4.0) + 2.0 * o.pib * (3.0 * o.ca / 4.0);
  const CylinderFunction psi_g =
      psi_increment(kF2, biased(), green, nu_b, 2, std::nan(""));
  for (std::size_t c = 0; c < b2.count(); ++c) {
    const auto w = b2.word_of(c);
    const double raw = w[0] < 2 ? o.cb / 4.0 : 3.0 * o.ca / 4.0;
    CHECK(psi_g.values[c] == doctest::Approx(raw - a_green).epsilon(1e-9));
  }
  CHECK(std::abs(nu_b.integrate(psi_g)) <= 1e-13);
}

TEST_CASE("the Hoelder seminorm weighs differences by the split depth") {
  const double alpha = 0.25;
  CylinderFunction flat = make_cylinder_function(kF2, 2);
  for (double& v : flat.values) v = 3.0;
  CHECK(holder_seminorm(flat, alpha) == 0.0);

  const CylinderBasis b2(kF2, 2);
  CylinderFunction ind = make_cylinder_function(kF2, 2);
  ind.values[b2.cell_of(std::vector<std::int16_t>{0, 0})] = 1.0; // [a a]
  CHECK(holder_seminorm(ind, alpha) == doctest::Approx(std::exp(alpha)).epsilon(1e-12));

  CylinderFunction firstletter = make_cylinder_function(kF2, 2);
  for (std::size_t c = 0; c < b2.count(); ++c)
    firstletter.values[c] = (b2.word_of(c)[0] < 2) ? 2.0 : -1.0;
  CHECK(holder_seminorm(firstletter, alpha) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("the Poisson equation solves to tolerance for the biased walk") {
  const StepDistribution mu = biased();
  const Metric word = word_metric(kF2);
  const StationaryMeasure nu = solve_stationary(kF2, mu, 6);
  const CylinderFunction psi = psi_increment(kF2, mu, word, nu, 6, std::nan(""));
  const PoissonSolution sol = solve_poisson(kF2, mu, nu, psi, 1e-8);
  CHECK(sol.residual <= 1e-8);
  CHECK(sol.lifted_residual <= 5e-3);
  CHECK(sol.tau_run < 0.95);
  CHECK(sol.terms >= 10);
  CHECK(sol.terms <= 300);
  CHECK(sol.u.sup_norm() == doctest::Approx(0.4367).epsilon(0.02));

  const double s2 = sigma2_green_kubo(kF2, mu, word, nu, sol.u, std::nan(""));
  CHECK(s2 == doctest::Approx(0.7506).epsilon(0.002));

  // depth robustness: one level shallower moves the variance only slightly
  const StationaryMeasure nu5 = solve_stationary(kF2, mu, 5);
  const CylinderFunction psi5 = psi_increment(kF2, mu, word, nu5, 5, std::nan(""));
  const PoissonSolution sol5 = solve_poisson(kF2, mu, nu5, psi5, 1e-8);
  const double s2_5 = sigma2_green_kubo(kF2, mu, word, nu5, sol5.u, std::nan(""));
  CHECK(std::abs(s2 - s2_5) <= 2e-3);
}

TEST_CASE("the symmetric walk needs no corrector and has variance three quarters") {
  const StepDistribution mu = srw();
  const Metric word = word_metric(kF2);
  const StationaryMeasure nu = solve_stationary(kF2, mu, 5);
  const CylinderFunction psi = psi_increment(kF2, mu, word, nu, 4, std::nan(""));
  const PoissonSolution sol = solve_poisson(kF2, mu, nu, psi, 1e-10);
  CHECK(sol.u.sup_norm() <= 1e-12);
  CHECK(sol.residual <= 1e-12);
  const double s2 = sigma2_green_kubo(kF2, mu, word, nu, sol.u, std::nan(""));
  CHECK(s2 == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("Poisson input validation and failure modes") {
  const StepDistribution mu = biased();
  const Metric word = word_metric(kF2);
  const StationaryMeasure nu = solve_stationary(kF2, mu, 3);
  // deliberately wrong centering: psi is no longer mean-zero
  const CylinderFunction bad = psi_increment(kF2, mu, word, nu, 2, 0.3);
  CHECK_THROWS_AS(solve_poisson(kF2, mu, nu, bad, 1e-8), NumericError);

  // a map that expands step by step can never sum to a Neumann series
  const auto expand = [](const std::vector<double>& v) {
    std::vector<double> out = v;
    for (double& x : out) x *= 1.01;
    return out;
  };
  CHECK_THROWS_AS(detail::neumann_sum(expand, std::vector<double>{1.0, -1.0}, 1e-12, 4000),
                  SpectralError);
  // a contracting map that is simply not given enough terms
  const auto half = [](const std::vector<double>& v) {
    std::vector<double> out = v;
    for (double& x : out) x *= 0.5;
    return out;
  };
  CHECK_THROWS_AS(detail::neumann_sum(half, std::vector<double>{1.0}, 1e-300, 5),
                  NumericError);
}

TEST_CASE("power iteration sees a genuine spectral gap") {
  for (const bool use_biased : {false, true}) {
    const StepDistribution mu = use_biased ? biased() : srw();
    const StationaryMeasure nu = solve_stationary(kF2, mu, 4);
    const SpectralReport rep = transfer_contraction(kF2, mu, nu, 4, 24, 20240903);
    CHECK(rep.iterations == 24);
    REQUIRE(rep.norms.size() >= 2);
    CHECK(rep.ratios.size() == rep.norms.size() - 1);
    CHECK(rep.tau_hat > 0.1);
    CHECK(rep.tau_hat < 0.98);
    for (std::size_t i = 1; i < rep.norms.size(); ++i)
      CHECK(rep.norms[i] <= rep.norms[i - 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("one walk step contracts boundary pairs on average") {
  const StepDistribution mu = srw();
  const StationaryMeasure nu = solve_stationary(kF2, mu, 2);
  const double alpha = 0.25;
  const ProximalityReport rep = proximality_scan(kF2, mu, nu, 1, alpha, 400, 20240903);
  CHECK(rep.pairs == 400);
  CHECK(rep.steps == 1);
  // one simple-walk step against a pair splitting at the root or deeper has
  // exactly two possible integral values; both are strictly below one
  const double shared = (3.0 * std::exp(-alpha) + std::exp(alpha)) / 4.0;
  const double disjoint = (2.0 * std::exp(-alpha) + 2.0) / 4.0;
  for (double v : rep.integrals) {
    const bool ok = std::abs(v - shared) <= 1e-9 || std::abs(v - disjoint) <= 1e-9;
    CHECK(ok);
  }
  CHECK(rep.sup_integral == doctest::Approx(shared).epsilon(1e-9));
  CHECK(rep.sup_integral < 1.0);

  const ProximalityReport rep2 = proximality_scan(kF2, mu, nu, 2, alpha, 200, 20240903);
  CHECK(rep2.sup_integral < 1.0);
}

TEST_CASE("stationary and transfer entry points validate their inputs") {
  CHECK_THROWS_AS(solve_stationary(kF2, srw(), 0), ConfigError);
  const GroupSpec fp = GroupSpec::parse("freeprod:2,3");
  CHECK_THROWS_AS(solve_stationary(fp, uniform_generator_measure(fp), 2),
                  CapabilityError);
  CHECK_THROWS_AS(solve_stationary(kF2, biased(), 2, 1e-15, 1), NumericError);
  CHECK_THROWS_AS(make_cylinder_function(kF2, 2, {1.0}), ConfigError);
  const StationaryMeasure nu1 = solve_stationary(kF2, srw(), 1);
  const Metric word = word_metric(kF2);
  CHECK_THROWS_AS(psi_increment(kF2, srw(), word, nu1, 0, std::nan("")), ConfigError);
}
