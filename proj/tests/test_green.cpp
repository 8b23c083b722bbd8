#include <doctest.h>

#include <cmath>
#include <vector>

#include "greenwalk/errors.hpp"
#include "greenwalk/green.hpp"
#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/metric.hpp"

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

// Return-probability DP on the distance birth-death chain of the simple
// walk (radius unbounded within n steps), summed into a truncated Green
// value at the identity. Independent of the ball-sweep convolution code.
double chain_green_at_identity(int truncation) {
  std::vector<double> p(static_cast<std::size_t>(truncation) + 2, 0.0);
  p[0] = 1.0;
  double green = 1.0; // the zero-step term
  for (int s = 1; s <= truncation; ++s) {
    std::vector<double> q(p.size(), 0.0);
    q[1] += p[0];
    for (std::size_t d = 1; d + 1 < p.size(); ++d) {
      q[d + 1] += 0.75 * p[d];
      q[d - 1] += 0.25 * p[d];
    }
    p.swap(q);
    green += p[0];
  }
  return green;
}

// Probability that the distance chain hits 0 within `truncation` steps when
// started at distance `start` (absorbing at 0): the first-passage oracle.
double chain_first_passage(int start, int truncation) {
  const std::size_t top = static_cast<std::size_t>(truncation + start) + 2;
  std::vector<double> hit(top, 0.0);
  hit[0] = 1.0;
  for (int s = 0; s < truncation; ++s) {
    std::vector<double> next(top, 0.0);
    next[0] = 1.0;
    for (std::size_t d = 1; d + 1 < top; ++d)
      next[d] = 0.25 * hit[d - 1] + 0.75 * hit[d + 1];
    hit.swap(next);
  }
  return hit[static_cast<std::size_t>(start)];
}

} // namespace

TEST_CASE("nearest-neighbour first passage solves its fixed point") {
  SUBCASE("simple walk: closed form one third") {
    const NnGreenAnalysis nn = nn_first_passage(kF2, srw());
    REQUIRE(nn.f.size() == 4);
    for (double f : nn.f) CHECK(f == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(nn.total == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(nn.gee == doctest::Approx(1.5).epsilon(1e-12));
    for (double c : nn.cost) CHECK(c == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
  SUBCASE("biased walk: the fixed-point equations hold at the returned values") {
    const StepDistribution mu = biased();
    const NnGreenAnalysis nn = nn_first_passage(kF2, mu);
    REQUIRE(nn.f.size() == 4);
    const double fa = nn.f[0], fb = nn.f[2];
    CHECK(nn.f[1] == doctest::Approx(fa).epsilon(1e-14)); // symmetric measure
    CHECK(nn.f[3] == doctest::Approx(fb).epsilon(1e-14));
    // f_s = mu(s) + f_s * sum_{t != s} mu(t) f_t, checked directly
    const double eq_a = 3.0 / 8.0 + fa * (3.0 / 8.0 * fa + 2.0 * (1.0 / 8.0) * fb);
    const double eq_b = 1.0 / 8.0 + fb * (2.0 * (3.0 / 8.0) * fa + 1.0 / 8.0 * fb);
    CHECK(fa == doctest::Approx(eq_a).epsilon(1e-13));
    CHECK(fb == doctest::Approx(eq_b).epsilon(1e-13));
    // agreement with an independently computed reference solution
    CHECK(fa == doctest::Approx(0.490500758289693745).epsilon(1e-12));
    CHECK(fb == doctest::Approx(0.206149614706421870).epsilon(1e-12));
    CHECK(nn.total == doctest::Approx(0.419412972393875776).epsilon(1e-12));
    CHECK(nn.gee == doctest::Approx(1.722394666865360168).epsilon(1e-12));
    CHECK(nn.cost[0] == doctest::Approx(0.712328454025429563).epsilon(1e-12));
    CHECK(nn.cost[2] == doctest::Approx(1.579153088827230395).epsilon(1e-12));
  }
}

TEST_CASE("the truncated kernel table matches the distance-chain oracle") {
  const GreenTable t = green_kernel(kF2, srw(), 60, 4, /*internal_radius=*/13);
  const double oracle = chain_green_at_identity(60);
  CHECK(oracle == doctest::Approx(1.4999959823278748).epsilon(1e-14));
  // the ball sweep loses only the mass that ever leaves radius 13
  CHECK(t.gee() == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(t.gee() < oracle + 1e-12);

  // kernel ratios against the exact tree decay 3^{-|x|}
  const BallResult b = ball(kF2, 4);
  for (const auto& x : b.elements) {
    const double expected = std::pow(3.0, -static_cast<double>(word_length(kF2, x)));
    CHECK(t.at(x) / t.gee() == doctest::Approx(expected).epsilon(1e-3));
  }

  CHECK(t.returns.size() == 61);
  CHECK(t.returns[0] == 1.0);
  CHECK(t.returns[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(t.returns[3] == 0.0);
  CHECK(t.rho_hat == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(0.01));
  CHECK(t.tail_bound > 0.0);
}

TEST_CASE("extending the truncation stays within the reported tail bound") {
  const GreenTable t60 = green_kernel(kF2, srw(), 60, 2, 13);
  const GreenTable t80 = green_kernel(kF2, srw(), 80, 2, 13);
  CHECK(t80.gee() > t60.gee());
  CHECK(t80.gee() - t60.gee() <= t60.tail_bound);
  CHECK(std::abs(t80.gee() - 1.5) < 2e-6);
}

TEST_CASE("first-passage probabilities match the absorbing-chain oracle") {
  const double f1 = first_passage(kF2, srw(), parse_element(kF2, "a"), 60, 13);
  const double oracle1 = chain_first_passage(1, 60);
  CHECK(oracle1 == doctest::Approx(0.3333328108902409).epsilon(1e-14));
  CHECK(f1 == doctest::Approx(oracle1).epsilon(1e-5));
  CHECK(f1 == doctest::Approx(1.0 / 3.0).epsilon(1e-3));

  const double f2 = first_passage(kF2, srw(), parse_element(kF2, "a.b"), 60, 13);
  CHECK(f2 == doctest::Approx(chain_first_passage(2, 60)).epsilon(1e-4));
  CHECK(f2 == doctest::Approx(1.0 / 9.0).epsilon(1e-3));

  CHECK(first_passage(kF2, srw(), identity_element(), 10) == 1.0);
}

TEST_CASE("the biased kernel table agrees with the algebraic fixed point") {
  const GreenTable t = green_kernel(kF2, biased(), 60, 3, 13);
  const NnGreenAnalysis nn = nn_first_passage(kF2, biased());
  CHECK(t.gee() == doctest::Approx(nn.gee).epsilon(2e-4));
  // multiplicative ratios along tree geodesics: G(e,x)/G(e,e) = prod f_letter
  const struct { const char* word; double f; } cases[] = {
      {"a", nn.f[0]},
      {"b", nn.f[2]},
      {"a.b", nn.f[0] * nn.f[2]},
      {"a.a", nn.f[0] * nn.f[0]},
      {"b-.a", nn.f[3] * nn.f[1]},
      {"a.b.a", nn.f[0] * nn.f[2] * nn.f[0]},
  };
  for (const auto& c : cases) {
    CAPTURE(c.word);
    CHECK(t.at(parse_element(kF2, c.word)) / t.gee() ==
          doctest::Approx(c.f).epsilon(2e-3));
  }
}

TEST_CASE("the Green word metric prices letters at log 3 on the simple walk") {
  const GreenTable t = green_kernel(kF2, srw(), 60, 4);
  const GroupElement a = parse_element(kF2, "a");
  const GroupElement ab = parse_element(kF2, "a.b");
  CHECK(green_metric(t, identity_element(), a) ==
        doctest::Approx(std::log(3.0)).epsilon(2e-3));
  CHECK(green_metric(t, identity_element(), ab) ==
        doctest::Approx(2.0 * std::log(3.0)).epsilon(2e-3));
  CHECK(green_metric(t, a, ab) == doctest::Approx(std::log(3.0)).epsilon(2e-3));
  CHECK(green_metric(t, ab, a) == doctest::Approx(green_metric(t, a, ab)).epsilon(1e-12));
  CHECK(green_metric(t, a, a) == doctest::Approx(0.0).epsilon(1e-12));

  const QiFit fit = quasi_isometry_fit(t);
  // the identity contributes d_word = d_G = 0 and is left out of the fit
  CHECK(fit.points == free_ball_size(2, 4) - 1);
  CHECK(fit.slope == doctest::Approx(std::log(3.0)).epsilon(0.01));
  CHECK(fit.additive <= 0.02);

  const Metric dg = green_word_metric(kF2, srw());
  REQUIRE(dg.kind == MetricKind::green);
  for (double c : dg.letter_cost) CHECK(c == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("Martin kernels and the Hilbert projective metric recover distances") {
  const GreenTable t = green_kernel(kF2, srw(), 60, 5);
  const GroupElement a = parse_element(kF2, "a");
  const MartinView ke = martin_kernel(t, identity_element());
  const MartinView ka = martin_kernel(t, a);
  CHECK(ke.at(identity_element()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ka.at(identity_element()) == doctest::Approx(1.0).epsilon(1e-12));
  // K_a(x) / K_e(x) = 3^{|x| - d(x,a) + 1} on the tree: 9 inside the a-cone,
  // 1 everywhere else, so the Hilbert distance is  log 3 = d_G(e, a)
  const HilbertResult h = hilbert_metric(ke, ka, 3);
  CHECK(h.beta == doctest::Approx(9.0).epsilon(0.01));
  CHECK(h.alpha == doctest::Approx(1.0).epsilon(0.01));
  CHECK(h.distance == doctest::Approx(std::log(3.0)).epsilon(0.01));
  // truncation noise may break ties within the a-cone (every point there
  // attains the sup), so check cone membership rather than an exact element
  REQUIRE(!h.arg_sup.word.empty());
  CHECK(h.arg_sup.word.front() == a.word.front());
  CHECK(h.arg_inf.word.empty() ? true : h.arg_inf.word.front() != a.word.front());

  const HilbertGreenReport rep = verify_hilbert_green(kF2, srw(), 2, 3, 60);
  CHECK(rep.pairs == 17 * 16 / 2);
  CHECK(rep.max_deviation <= 5e-3);
  REQUIRE(!rep.worst.empty());
  CHECK(rep.worst.front().deviation == doctest::Approx(rep.max_deviation));
  for (std::size_t i = 1; i < rep.worst.size(); ++i)
    CHECK(rep.worst[i - 1].deviation >= rep.worst[i].deviation);
  for (const auto& p : rep.worst)
    CHECK(std::abs(p.hilbert - p.green) == doctest::Approx(p.deviation).epsilon(1e-12));
}

TEST_CASE("kernel tables work on free products through the generic path") {
  const GroupSpec fp = GroupSpec::parse("freeprod:2,3");
  const StepDistribution mu = uniform_generator_measure(fp);
  const GreenTable t = green_kernel(fp, mu, 40, 2);
  CHECK(t.gee() > 1.0);
  const GroupElement a = parse_element(fp, "a");
  const GroupElement bb = parse_element(fp, "b");
  CHECK(t.at(a) < t.gee());
  CHECK(t.at(a) > 0.0);
  // symmetric measure: G(e, x) = G(e, x^{-1})
  CHECK(t.at(bb) == doctest::Approx(t.at(parse_element(fp, "b-"))).epsilon(1e-12));
  // dual route: the kernel ratio is a first-passage probability
  const double fa = first_passage(fp, mu, a, 40);
  CHECK(t.at(a) / t.gee() == doctest::Approx(fa).epsilon(2e-2));

  // small lamplighter tables run through the same generic path
  const GroupSpec lamp = GroupSpec::parse("zwrz");
  const GreenTable lt = green_kernel(lamp, uniform_generator_measure(lamp), 20, 1);
  CHECK(lt.gee() > 1.0);
  CHECK(std::isfinite(lt.gee()));
}

TEST_CASE("kernel construction reports its accuracy and resource limits") {
  CHECK_THROWS_AS(green_kernel(kF2, srw(), 20, 2, -1, /*tol=*/1e-12), AccuracyError);
  CHECK_THROWS_AS(green_kernel(kF2, srw(), 60, 12), ResourceError);
  CHECK_THROWS_AS(green_word_metric(GroupSpec::parse("freeprod:2,3"),
                                    uniform_generator_measure(GroupSpec::parse("freeprod:2,3"))),
                  CapabilityError);
  const StepDistribution far = measure_from_pairs(kF2, {{"a.b", 1.0}, {"b-.a-", 1.0},
                                                        {"b", 1.0}, {"b-", 1.0}});
  CHECK_THROWS_AS(green_word_metric(kF2, far), CapabilityError);
  const GreenTable t = green_kernel(kF2, srw(), 40, 2);
  CHECK_THROWS_AS(t.at(parse_element(kF2, "a.b.a")), CapabilityError);
  CHECK_THROWS_AS(nn_first_passage(kF2, far), CapabilityError);
}
