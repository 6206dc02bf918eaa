#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "scoring/rules.hpp"

using namespace scoring;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Brier accuracy straight from the definition: sum over all events A of
// (1_A(w) - c(A))^2, negated.
std::vector<double> brier_oracle(const std::vector<double>& event_values, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t a = 0; a < event_values.size(); ++a) {
      const double ind = (a >> w) & 1u ? 1.0 : 0.0;
      out[w] -= (ind - event_values[a]) * (ind - event_values[a]);
    }
  }
  return out;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::BadInput;
}

}  // namespace

TEST(TwoCircle, FigureOnePoint) {
  const ScoreVector s = evaluate(two_circle_rule(), Probability({3.0 / 7.0, 4.0 / 7.0}));
  EXPECT_NEAR(s[0].value(), 0.6, 1e-12);
  EXPECT_NEAR(s[1].value(), 1.8, 1e-12);
}

TEST(TwoCircle, PointMass) {
  const ScoreVector s = evaluate(two_circle_rule(), Probability({1.0, 0.0}));
  EXPECT_EQ(s[0].value(), 2.0);
  EXPECT_EQ(s[1].value(), 0.0);
}

TEST(TwoCircle, ScoresLieOnTheArcs) {
  const ScoringRule r = two_circle_rule();
  for (const auto& p : sample_simplex(2, 1000, false)) {
    const auto s = evaluate(r, p).finite_values();
    const double theta = std::atan2(p[1], p[0]);
    const double cx = theta <= std::numbers::pi / 4 ? 1.0 : 0.0;
    EXPECT_NEAR(std::hypot(s[0] - cx, s[1] - (1.0 - cx)), 1.0, 1e-12);
  }
}

TEST(TwoCircle, DiagonalBelongsToFirstArc) {
  const ScoreVector s = evaluate(two_circle_rule(), Probability({0.5, 0.5}));
  EXPECT_NEAR(s[0].value(), 1.0 + std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(s[1].value(), std::sqrt(0.5), 1e-12);
}

TEST(TwoCircle, RejectsIncoherentCredence) {
  EXPECT_EQ(kind_of([] { evaluate(two_circle_rule(), Credence(2, {0, 0.6, 0.6, 1})); }), ErrorKind::DomainViolation);
}

TEST(Brier, MatchesDefinition) {
  const ScoreVector s = evaluate(brier_rule(2), Probability({0.5, 0.5}));
  const auto oracle = brier_oracle({0.0, 0.5, 0.5, 1.0}, 2);
  EXPECT_NEAR(oracle[0], -0.5, 1e-15);
  EXPECT_NEAR(s[0].value(), oracle[0], 1e-12);
  EXPECT_NEAR(s[1].value(), oracle[1], 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 4;
    std::vector<double> v(std::size_t{1} << n);
    for (auto& x : v) x = u(rng);
    const auto got = evaluate(brier_rule(n), Credence(n, v)).finite_values();
    const auto want = brier_oracle(v, n);
    for (std::size_t w = 0; w < n; ++w) EXPECT_NEAR(got[w], want[w], 1e-12);
  }
}

TEST(Brier, CoherentRangeOnTwoOutcomes) {
  double lo = 0.0, hi = -kInf;
  for (const auto& p : sample_simplex(2, 400, false)) {
    const auto vals = evaluate(brier_rule(2), p).finite_values();
    for (double x : vals) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  EXPECT_NEAR(lo, -2.0, 1e-12);
  EXPECT_NEAR(hi, 0.0, 1e-12);
}

TEST(Log, PointMass) {
  const ScoreVector s = evaluate(log_rule(2), Probability({1.0, 0.0}));
  EXPECT_EQ(s[0].value(), 0.0);
  EXPECT_TRUE(s[1].is_neg_inf());
  EXPECT_EQ(log_rule(3).domain(), RuleDomain::ProbabilitiesOnly);
}

TEST(Spherical, NormalizedWeightsAndZeroGuard) {
  const ScoreVector s = evaluate(spherical_rule(2), Probability({0.6, 0.8 - 0.4}));
  const double norm = std::hypot(0.6, 0.4);
  EXPECT_NEAR(s[0].value(), 0.6 / norm, 1e-12);
  EXPECT_NEAR(s[1].value(), 0.4 / norm, 1e-12);
  EXPECT_EQ(kind_of([] { evaluate(spherical_rule(2), Credence(2, {0, 0, 0, 1})); }), ErrorKind::ZeroVector);
  // incoherent credences use the singleton weights
  const ScoreVector c = evaluate(spherical_rule(2), Credence(2, {0, 0.6, 0.6, 1}));
  EXPECT_NEAR(c[0].value(), std::sqrt(0.5), 1e-12);
}

TEST(MakeRule, Metadata) {
  const ScoringRule b = brier_rule(2);
  EXPECT_EQ(b.upper_bound(), 0.0);
  EXPECT_EQ(b.domain(), RuleDomain::AllCredences);
  const ScoringRule t = two_circle_rule();
  EXPECT_EQ(t.upper_bound(), 2.0);
  EXPECT_EQ(t.domain(), RuleDomain::ProbabilitiesOnly);
  EXPECT_NO_THROW(s_alpha_rule(b, -3.0));
  EXPECT_EQ(kind_of([] { brier_rule(17); }), ErrorKind::BadSpec);
}

TEST(SAlpha, Transform) {
  const ScoringRule b = brier_rule(2);
  const ScoreVector s = s_alpha_transform(b, -3.0, Probability({1.0, 0.0}));
  EXPECT_EQ(s[0].value(), 0.0);
  EXPECT_EQ(s[1].value(), -3.0);
  const ScoreVector r = s_alpha_transform(b, -3.0, Probability({0.5, 0.5}));
  EXPECT_EQ(r, evaluate(b, Probability({0.5, 0.5})));
  EXPECT_EQ(kind_of([&] { s_alpha_transform(b, -0.1, Probability({0.5, 0.5})); }), ErrorKind::BadAlpha);
  // -2 is the coherent minimum and is allowed; anything above is not
  EXPECT_NO_THROW(s_alpha_rule(b, -2.0));
  EXPECT_EQ(kind_of([&] { s_alpha_rule(b, -1.999); }), ErrorKind::BadAlpha);
  EXPECT_EQ(kind_of([] { s_alpha_rule(log_rule(2), -100.0); }), ErrorKind::BadSpec);
}

TEST(SAlpha, SelfScoreUnchanged) {
  const ScoringRule b = brier_rule(3);
  const ScoringRule sa = s_alpha_rule(b, -5.0);
  for (const auto& p : sample_simplex(3, 20, false)) {
    EXPECT_EQ(expected_score(p, evaluate(sa, p)), expected_score(p, evaluate(b, p)));
  }
}

TEST(BoundaryBonus, DesignedLimitFailure) {
  const ScoringRule r = boundary_bonus_rule();
  const ScoreVector a = evaluate(r, Probability({1.0, 0.0}));
  EXPECT_EQ(a[0].value(), -2.0);
  EXPECT_TRUE(a[1].is_neg_inf());
  const ScoreVector b = evaluate(r, Probability({0.0, 1.0}));
  EXPECT_TRUE(b[0].is_neg_inf());
  EXPECT_EQ(b[1].value(), -2.0);
  EXPECT_EQ(expected_score(Probability({1.0, 0.0}), a).value(), -2.0);
  // E_p brier(p) = -2 p1 p2 on two outcomes, then the shift
  const double e = 1.0 / 10000;
  const Probability pk({1.0 - e, e});
  EXPECT_NEAR(expected_score(pk, evaluate(r, pk)).value(), -2.0 * e * (1.0 - e) - 3.0, 1e-12);
  EXPECT_NEAR(expected_score(pk, evaluate(r, pk)).value(), -3.0, 1e-3);
  // finite scores are shifted Brier scores
  const ScoreVector mid = evaluate(r, Probability({0.5, 0.5}));
  EXPECT_NEAR(mid[0].value(), -3.5, 1e-12);
}

TEST(Catalog, EntriesBoundedByM) {
  std::vector<ScoringRule> rules = {brier_rule(2), brier_rule(3), spherical_rule(2), spherical_rule(3),
                                    log_rule(2),   log_rule(3),   two_circle_rule(),  boundary_bonus_rule(),
                                    s_alpha_rule(brier_rule(2), -3.0)};
  for (const auto& r : rules) {
    for (const auto& p : sample_simplex(r.outcomes(), r.outcomes() == 2 ? 500 : 40, false)) {
      const ScoreVector s = evaluate(r, p);
      for (auto e : s.entries()) EXPECT_LE(e.raw(), r.upper_bound()) << r.name();
    }
  }
}

TEST(Additive, ReproducesBrier) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (std::size_t n : {2u, 3u}) {
    const ScoringRule add = additive_rule(n, brier_components(n), 0.0, "brier-additive");
    const ScoringRule b = brier_rule(n);
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> v(std::size_t{1} << n);
      for (auto& x : v) x = u(rng);
      const Credence c(n, v);
      const auto got = evaluate(add, c).finite_values();
      const auto want = evaluate(b, c).finite_values();
      for (std::size_t w = 0; w < n; ++w) EXPECT_NEAR(got[w], want[w], 1e-12);
    }
  }
  EXPECT_EQ(kind_of([] { additive_rule(2, brier_components(3), 0.0); }), ErrorKind::BadSpec);
}

TEST(Extended, ConstantFillOffProbabilities) {
  const ScoringRule ext = extend_with_vector(two_circle_rule(), ScoreVector::from_doubles(std::vector{1.15711, 1.15711}));
  const ScoreVector c = evaluate(ext, Credence(2, {0, 0.6, 0.6, 1}));
  EXPECT_EQ(c[0].value(), 1.15711);
  EXPECT_EQ(c[1].value(), 1.15711);
  const ScoreVector p = evaluate(ext, Probability({1.0, 0.0}));
  EXPECT_EQ(p[0].value(), 2.0);
  EXPECT_EQ(p[1].value(), 0.0);
  // coherent credences go to the base rule
  const ScoreVector q = evaluate(ext, Credence(2, {0, 1, 0, 1}));
  EXPECT_EQ(q[0].value(), 2.0);
  EXPECT_EQ(ext.domain(), RuleDomain::AllCredences);
  EXPECT_EQ(kind_of([] { extend_with_vector(two_circle_rule(), ScoreVector::from_doubles(std::vector{3.0, 0.0})); }),
            ErrorKind::EntryAboveM);
}

TEST(Negated, FlipsSign) {
  const ScoringRule neg = negated_rule(brier_rule(2));
  const ScoreVector s = evaluate(neg, Probability({0.5, 0.5}));
  EXPECT_EQ(s[0].value(), 0.5);
  EXPECT_EQ(neg.upper_bound(), 2.0);
  EXPECT_EQ(kind_of([] { negated_rule(log_rule(2)); }), ErrorKind::BadSpec);
}

TEST(Describe, InfiniteScoreProbabilities) {
  const RuleReport r = describe_rule(log_rule(2), 2);
  EXPECT_EQ(r.grid_points, 3u);
  ASSERT_EQ(r.infinite_score_probabilities.size(), 2u);
  EXPECT_EQ(describe_rule(brier_rule(2), 10).infinite_score_probabilities.size(), 0u);
}
