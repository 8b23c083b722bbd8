#include "greenwalk/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "greenwalk/boundary.hpp"
#include "greenwalk/cylinder.hpp"
#include "greenwalk/errors.hpp"
#include "greenwalk/green.hpp"
#include "greenwalk/group.hpp"
#include "greenwalk/limits.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/metric.hpp"
#include "greenwalk/stats.hpp"

namespace greenwalk {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

/// Collects assertions for one check; the first failure wins the detail line.
struct Probe {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol,
           what + ": got " + num(got) + ", want " + num(want) + " +/- " + num(tol));
  }
  CheckResult done(const std::string& name, const std::string& ok_note) const {
    CheckResult r;
    r.name = name;
    r.pass = pass;
    r.detail = pass ? ok_note : detail;
    return r;
  }
};

GroupSpec f2() { return GroupSpec::parse("free:2"); }

StepDistribution srw() { return uniform_generator_measure(f2()); }

StepDistribution biased() {
  return measure_from_pairs(
      f2(), {{"a", 3.0 / 8.0}, {"a-", 3.0 / 8.0}, {"b", 1.0 / 8.0}, {"b-", 1.0 / 8.0}});
}

// frozen outputs of the nearest-neighbour fixed point for the biased measure
constexpr double kBiasedFa = 0.490500758289693745;
constexpr double kBiasedFb = 0.206149614706421870;
constexpr double kBiasedGee = 1.722394666865360168;
constexpr double kBiasedPiA = 0.329084541260166210;
constexpr double kBiasedPiB = 0.170915458739833790;

CheckResult check_ball_sizes() {
  Probe p;
  const GroupSpec spec = f2();
  const std::size_t want[] = {1, 5, 17, 53, 161, 485, 1457};
  for (int r = 0; r <= 6; ++r) {
    p.expect(ball(spec, r).elements.size() == want[r],
             "ball(" + std::to_string(r) + ") has " +
                 std::to_string(ball(spec, r).elements.size()) + " elements, want " +
                 std::to_string(want[r]));
    p.expect(free_ball_size(2, r) == want[r], "closed-form ball size mismatch");
  }
  return p.done("free-ball-sizes", "|B(r)| = 1,5,17,53,161,485,1457 for r = 0..6");
}

CheckResult check_group_examples() {
  Probe p;
  const GroupSpec spec = f2();
  const GroupElement a = parse_element(spec, "a");
  const GroupElement ab = parse_element(spec, "a.b");
  p.expect(is_identity(multiply(spec, a, parse_element(spec, "a-"))), "a * a^-1 != e");
  p.expect(multiply(spec, ab, parse_element(spec, "b-.a")) == parse_element(spec, "a.a"),
           "ab * b^-1 a != a^2");
  p.expect(inverse(spec, ab) == parse_element(spec, "b-.a-"), "(ab)^-1 != b^-1 a^-1");
  p.expect(word_length(spec, parse_element(spec, "a.b.a-")) == 3, "|aba^-1| != 3");

  const GroupSpec lamp = GroupSpec::parse("zwrz");
  GroupElement g = identity_element();
  g = apply_letter(lamp, g, lamp.parse_letter("t"));
  g = apply_letter(lamp, g, lamp.parse_letter("a"));
  p.expect(format_element(lamp, g) == "L{1:1}|1", "t.a lands on " + format_element(lamp, g));
  const GroupElement h = parse_element(lamp, "L{0:1}|1");
  p.expect(inverse(lamp, h) == parse_element(lamp, "L{-1:-1}|-1"),
           "lamplighter inverse of L{0:1}|1 is " + format_element(lamp, inverse(lamp, h)));
  p.expect(is_identity(multiply(lamp, h, inverse(lamp, h))), "g * g^-1 != e on zwrz");
  p.expect(word_length(lamp, parse_element(lamp, "L{0:1}|0")) == 1, "|a| != 1 on zwrz");
  // two lamps at -1 and +1, walker home: 2 flips + the optimal round tour 4
  // (a commonly quoted value is 5, which no generator path attains; BFS says 6)
  p.expect(word_length(lamp, parse_element(lamp, "L{-1:1,1:1}|0")) == 6,
           "two-lamp tour length != 6");
  return p.done("group-worked-examples", "multiply/invert/length worked cases hold");
}

CheckResult check_gromov_products() {
  Probe p;
  const GroupSpec spec = f2();
  const GroupElement e = identity_element();
  auto g2 = [&](const char* x, const char* y) {
    return gromov2_elements(spec, parse_element(spec, x), parse_element(spec, y), e);
  };
  p.expect(g2("a", "a.a") == 2, "(a, a^2)_e != 1");
  p.expect(g2("a", "b") == 0, "(a, b)_e != 0");
  p.expect(g2("a.b", "a.b-") == 2, "(ab, ab^-1)_e != 1");
  return p.done("gromov-products", "(a,a^2)=1, (a,b)=0, (ab,ab^-1)=1");
}

CheckResult check_returns() {
  Probe p;
  const GroupSpec spec = f2();
  const StepDistribution mu = srw();
  p.near(mass_at(convolution_power(spec, mu, 2), identity_element()), 0.25, 1e-15,
         "mu*2(e)");
  p.near(mass_at(convolution_power(spec, mu, 3), identity_element()), 0.0, 1e-15,
         "mu*3(e)");
  p.near(mass_at(convolution_power(spec, mu, 4), identity_element()), 7.0 / 64.0, 1e-15,
         "mu*4(e)");
  p.near(mass_at(convolution_power(spec, mu, 8), identity_element()), 0.03192138671875,
         1e-15, "mu*8(e)");
  return p.done("return-probabilities", "mu*n(e) matches exact values for n=2,3,4,8");
}

CheckResult check_green_closed_form() {
  Probe p;
  const GroupSpec spec = f2();
  const GreenTable t = green_kernel(spec, srw(), 60, 4);
  p.near(t.gee(), 1.5, 1e-3, "G_60(e,e)");
  const BallResult b = ball(spec, 4);
  double worst = 0.0;
  for (const auto& x : b.elements) {
    const double ratio = t.at(x) / t.gee();
    worst = std::max(worst,
                     std::abs(ratio - std::pow(3.0, -static_cast<double>(
                                                         word_length(spec, x)))));
  }
  p.expect(worst <= 1e-3, "max |G/Gee - 3^-|x|| = " + num(worst) + " > 1e-3");
  return p.done("green-closed-form",
                "G_60(e,e) = " + num(t.gee()) + ", kernel ratio deviation <= 1e-3");
}

CheckResult check_first_passage() {
  Probe p;
  const GroupSpec spec = f2();
  const double f = first_passage(spec, srw(), parse_element(spec, "a"), 60);
  p.near(f, 1.0 / 3.0, 1e-3, "F_60(e,a)");
  const double f2v = first_passage(spec, srw(), parse_element(spec, "a.b"), 60);
  p.near(f2v, 1.0 / 9.0, 1e-3, "F_60(e,ab)");
  return p.done("first-passage", "F(e,a) ~ 1/3 and F(e,ab) ~ 1/9 within 1e-3");
}

CheckResult check_nn_fixed_point() {
  Probe p;
  const GroupSpec spec = f2();
  const NnGreenAnalysis s = nn_first_passage(spec, srw());
  for (int l = 0; l < 4; ++l)
    p.near(s.f[static_cast<std::size_t>(l)], 1.0 / 3.0, 1e-12, "SRW f");
  p.near(s.gee, 1.5, 1e-12, "SRW G(e,e)");
  const NnGreenAnalysis b = nn_first_passage(spec, biased());
  p.near(b.f[static_cast<std::size_t>(spec.parse_letter("a"))], kBiasedFa, 1e-9,
         "biased f_a");
  p.near(b.f[static_cast<std::size_t>(spec.parse_letter("b"))], kBiasedFb, 1e-9,
         "biased f_b");
  p.near(b.gee, kBiasedGee, 1e-9, "biased G(e,e)");
  return p.done("nn-fixed-point", "first-passage fixed point exact for both measures");
}

CheckResult check_green_metric() {
  Probe p;
  const GroupSpec spec = f2();
  const Metric dg = green_word_metric(spec, srw());
  const GroupElement a = parse_element(spec, "a");
  p.near(dg.dist0(a), std::log(3.0), 1e-12, "d_G(e,a) letter cost");
  const GreenTable t = green_kernel(spec, srw(), 60, 3);
  p.near(green_metric(t, identity_element(), a), std::log(3.0), 2e-3,
         "d_G(e,a) from the table");
  const QiFit fit = quasi_isometry_fit(t);
  p.near(fit.slope, std::log(3.0), 0.01 * std::log(3.0), "QI slope");
  p.expect(fit.additive <= 0.02, "QI additive constant " + num(fit.additive) + " > 0.02");
  return p.done("green-metric",
                "d_G = (log 3) d_word on the tree: slope " + num(fit.slope) +
                    ", additive " + num(fit.additive));
}

CheckResult check_horofunctions() {
  Probe p;
  const GroupSpec spec = f2();
  const BoundaryPoint axx = BoundaryPoint::from_word(spec, "a", 32);
  const BoundaryPoint abxx = BoundaryPoint::from_word(spec, "a.b", 32);
  p.expect(horofunction(spec, axx, parse_element(spec, "a")) == -1, "h_{a^inf}(a) != -1");
  p.expect(horofunction(spec, axx, parse_element(spec, "b")) == 1, "h_{a^inf}(b) != +1");
  p.expect(horofunction(spec, abxx, parse_element(spec, "a.a")) == 0,
           "h_{ab^inf}(a^2) != 0");
  const Metric dg = green_word_metric(spec, srw());
  p.near(horofunction_weighted(spec, axx, parse_element(spec, "a"), dg), -std::log(3.0),
         1e-12, "weighted h_{a^inf}(a)");
  return p.done("horofunctions", "h values -1/+1/0 and the log-3 scaling hold");
}

CheckResult check_boundary_action() {
  Probe p;
  const GroupSpec spec = f2();
  const BoundaryPoint axx = BoundaryPoint::from_word(spec, "a", 32);
  const BoundaryPoint abxx = BoundaryPoint::from_word(spec, "a.b", 32);

  const auto r1 = boundary_action(spec, parse_element(spec, "a"), axx);
  p.expect(r1.image.digits[0] == axx.digits[0] && r1.image.depth() >= 30,
           "a . a^inf != a^inf");
  p.expect(r1.busemann == 1, "busemann of a at a^inf != h(a^-1) = 1");

  const auto r2 = boundary_action(spec, parse_element(spec, "a-"), abxx);
  p.expect(r2.image.digits[0] == spec.parse_letter("b"), "a^-1 . ab^inf != b^inf");

  const auto r3 = boundary_action(spec, parse_element(spec, "b"), axx);
  p.expect(r3.image.digits[0] == spec.parse_letter("b") &&
               r3.image.digits[1] == spec.parse_letter("a"),
           "b . a^inf != b a^inf");
  return p.done("boundary-action", "prefix action worked cases hold");
}

CheckResult check_cocycle() {
  Probe p;
  const GroupSpec spec = f2();
  const BoundaryPoint axx = BoundaryPoint::from_word(spec, "a", 48);
  const BoundaryPoint abxx = BoundaryPoint::from_word(spec, "a.b", 48);
  const CocycleCase c1 = cocycle_case(spec, parse_element(spec, "a"), axx, abxx);
  p.expect(c1.lhs2 == 2, "doubled LHS != 2 on the worked triple");
  p.expect(c1.match_mine, "-(h+h)/2 identity failed on the worked triple");
  p.expect(c1.quoted2 == -8 && !c1.match_quoted,
           "quoted factor-2 variant unexpectedly matched");
  const CocycleCase c2 = cocycle_case(spec, identity_element(), axx, abxx);
  p.expect(c2.lhs2 == 0 && c2.match_mine, "identity element case failed");
  const BoundaryPoint bxx = BoundaryPoint::from_word(spec, "b", 48);
  const CocycleCase c3 = cocycle_case(spec, parse_element(spec, "b"), axx, bxx);
  p.expect(c3.match_mine, "g = b case failed");
  return p.done("cocycle-identity",
                "product shift equals -(h_xi(g)+h_eta(g))/2 exactly; the "
                "quoted factor-2 variant does not match");
}

CheckResult check_delta_zero() {
  Probe p;
  const GroupSpec spec = f2();
  const DeltaReport d = hyperbolicity_delta_word(spec, ball(spec, 3).elements, 0);
  p.expect(d.exact_zero && d.delta == 0.0,
           "word-metric delta on ball(3) is " + num(d.delta) + ", want exactly 0");
  return p.done("delta-exact-zero", "four-point constant on ball(3) is exactly 0");
}

CheckResult check_harmonic_cylinders() {
  Probe p;
  const GroupSpec spec = f2();
  const StationaryMeasure nu1 = solve_stationary(spec, srw(), 1);
  for (double m : nu1.level_mass[1]) p.near(m, 0.25, 1e-10, "SRW nu at depth 1");
  const StationaryMeasure nu2 = solve_stationary(spec, srw(), 2);
  for (double m : nu2.level_mass[2]) p.near(m, 1.0 / 12.0, 1e-10, "SRW nu at depth 2");
  p.expect(nu2.residual <= 1e-12, "stationarity residual " + num(nu2.residual));

  const StationaryMeasure nub = solve_stationary(spec, biased(), 1);
  const auto& idx = *nub.idx;
  auto mass1 = [&](const char* s) {
    std::vector<std::int16_t> w{static_cast<std::int16_t>(spec.parse_letter(s))};
    return nub.level_mass[1][idx.index_of(w) - idx.level_begin(1)];
  };
  p.near(mass1("a"), kBiasedPiA, 1e-9, "biased nu[a]");
  p.near(mass1("a-"), kBiasedPiA, 1e-9, "biased nu[a-]");
  p.near(mass1("b"), kBiasedPiB, 1e-9, "biased nu[b]");
  return p.done("harmonic-cylinders",
                "exact hitting masses: uniform 1/4 and 1/12 for SRW, "
                "f_s/(1+f_s) normalization for the biased measure");
}

CheckResult check_psi_values() {
  Probe p;
  const GroupSpec spec = f2();
  const StepDistribution mu = biased();
  const StationaryMeasure nu = solve_stationary(spec, mu, 2);
  const Metric dw = word_metric(spec);
  const CylinderFunction psi = psi_increment(spec, mu, dw, nu, 2, std::nan(""));
  p.near(nu.integrate(psi), 0.0, 1e-12, "nu-mean of psi");
  const auto& basis = *psi.basis;
  const int la = spec.parse_letter("a");
  for (std::size_t c = 0; c < basis.count(); ++c) {
    const auto w = basis.word_of(c);
    // psi only sees the leading letter; a and a^-1 behave alike by symmetry
    const bool a_family = (w[0] >> 1) == (la >> 1);
    const double want = a_family ? -0.170915458739833790 : 0.329084541260166210;
    p.near(psi.values[c], want, 1e-9, "psi on a depth-2 cell");
  }
  return p.done("psi-increment", "centered cocycle increment matches exact values");
}

CheckResult check_poisson_srw() {
  Probe p;
  const GroupSpec spec = f2();
  const StepDistribution mu = srw();
  const StationaryMeasure nu = solve_stationary(spec, mu, 4);
  const Metric dw = word_metric(spec);
  const CylinderFunction psi = psi_increment(spec, mu, dw, nu, 4, std::nan(""));
  p.expect(psi.sup_norm() <= 1e-14, "SRW psi is not identically zero");
  const PoissonSolution sol = solve_poisson(spec, mu, nu, psi, 1e-12, 100);
  p.expect(sol.u.sup_norm() <= 1e-12, "SRW u is not identically zero");
  p.expect(sol.residual <= 1e-12, "SRW Poisson residual " + num(sol.residual));
  return p.done("poisson-srw", "psi = 0 and u = 0 for the isotropic walk");
}

CheckResult check_sigma2_srw() {
  Probe p;
  const GroupSpec spec = f2();
  const StepDistribution mu = srw();
  const StationaryMeasure nu = solve_stationary(spec, mu, 2);
  const Metric dw = word_metric(spec);
  const CylinderFunction u = make_cylinder_function(spec, 2); // exact solution
  const double s2 = sigma2_green_kubo(spec, mu, dw, nu, u, std::nan(""));
  p.near(s2, 0.75, 1e-12, "sigma^2 for SRW, word metric");
  return p.done("sigma2-srw", "Green-Kubo variance = 3/4 exactly");
}

CheckResult check_proximality() {
  Probe p;
  const GroupSpec spec = f2();
  const StepDistribution mu = srw();
  const StationaryMeasure nu = solve_stationary(spec, mu, 2);
  const double alpha = 0.25;
  const ProximalityReport rep = proximality_scan(spec, mu, nu, 1, alpha, 40, 5);
  // one-step integrals take exactly two values on a tree: pairs that share a
  // prefix contract by e^{-a} three ways and expand by e^{+a} once; disjoint
  // pairs split half/half between e^{-a} and 1
  const double shared = (3.0 * std::exp(-alpha) + std::exp(alpha)) / 4.0;
  const double disjoint = (2.0 * std::exp(-alpha) + 2.0) / 4.0;
  for (double v : rep.integrals)
    p.expect(std::abs(v - shared) <= 1e-9 || std::abs(v - disjoint) <= 1e-9,
             "integral " + num(v) + " is neither " + num(shared) + " nor " +
                 num(disjoint));
  p.near(rep.sup_integral, shared, 1e-9, "sup integral");
  p.expect(rep.sup_integral < 1.0, "proximality certificate failed");
  return p.done("proximality", "I_1 = " + num(rep.sup_integral) + " < 1");
}

CheckResult check_ks_calibration() {
  Probe p;
  const std::vector<double> good = gaussian_samples(2000, 11);
  const KsResult ok = ks_test_gaussian(good, 0.0, 1.0);
  p.expect(ok.p_value > 0.01, "calibrated KS p = " + num(ok.p_value) + " <= 0.01");
  std::vector<double> bad = good;
  for (double& v : bad) v *= 1.2;
  const KsResult rej = ks_test_gaussian(bad, 0.0, 1.0);
  p.expect(rej.p_value < 1e-4,
           "KS failed to reject variance 1.44: p = " + num(rej.p_value));
  return p.done("ks-calibration", "accepts N(0,1), rejects inflated variance");
}

CheckResult check_drift_formula() {
  Probe p;
  const GroupSpec spec = f2();
  const StepDistribution mu = srw();
  const StationaryMeasure nu = solve_stationary(spec, mu, 1);
  p.near(drift_formula(spec, mu, word_metric(spec), nu), 0.5, 1e-12, "word drift");
  p.near(drift_formula(spec, mu, green_word_metric(spec, mu), nu), 0.5 * std::log(3.0),
         1e-12, "Green drift");
  return p.done("drift-formula", "A = 1/2 (word) and (log 3)/2 (Green) exactly");
}

} // namespace

const std::vector<Check>& selfcheck_registry() {
  static const std::vector<Check> registry = {
      {"free-ball-sizes", check_ball_sizes},
      {"group-worked-examples", check_group_examples},
      {"gromov-products", check_gromov_products},
      {"return-probabilities", check_returns},
      {"green-closed-form", check_green_closed_form},
      {"first-passage", check_first_passage},
      {"nn-fixed-point", check_nn_fixed_point},
      {"green-metric", check_green_metric},
      {"horofunctions", check_horofunctions},
      {"boundary-action", check_boundary_action},
      {"cocycle-identity", check_cocycle},
      {"delta-exact-zero", check_delta_zero},
      {"harmonic-cylinders", check_harmonic_cylinders},
      {"psi-increment", check_psi_values},
      {"poisson-srw", check_poisson_srw},
      {"sigma2-srw", check_sigma2_srw},
      {"proximality", check_proximality},
      {"ks-calibration", check_ks_calibration},
      {"drift-formula", check_drift_formula},
  };
  return registry;
}

std::vector<CheckResult> run_selfchecks(const std::string& filter) {
  std::vector<CheckResult> out;
  for (const Check& c : selfcheck_registry()) {
    if (!filter.empty() && c.name.find(filter) == std::string::npos) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c.fn();
    } catch (const std::exception& e) {
      r.name = c.name;
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace greenwalk
