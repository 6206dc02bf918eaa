#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scoring/core.hpp"

using namespace scoring;

namespace {

ScoreVector sv(std::initializer_list<double> v) { return ScoreVector::from_doubles(std::vector<double>(v)); }

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtendedReal naive_dot(const std::vector<double>& f, const ScoreVector& g) {
  // the zero-weight terms are dropped before summing
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] != 0.0) s += f[i] * g[i].raw();
  }
  return ExtendedReal::from_double(s);
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n, bool zeros) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) {
    x = (zeros && u(rng) < 0.3) ? 0.0 : u(rng) + 1e-3;
    s += x;
  }
  if (s == 0.0) {
    w[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : w) x /= s;
  return w;
}

}  // namespace

TEST(ExtendedReal, OrderingAndArithmetic) {
  EXPECT_LT(kNegInf, ExtendedReal(-1e300));
  EXPECT_EQ(kNegInf + ExtendedReal(5.0), kNegInf);
  EXPECT_EQ((ExtendedReal(2.0) + ExtendedReal(3.0)).value(), 5.0);
  EXPECT_EQ(kNegInf.times(0.0), ExtendedReal(0.0));
  EXPECT_EQ(kNegInf.times(0.5), kNegInf);
  EXPECT_EQ(kNegInf.to_string(), "-inf");
  EXPECT_THROW(ExtendedReal(std::nan("")), Error);
  EXPECT_THROW(kNegInf.value(), Error);
}

TEST(ExtendedReal, OverflowIsAnError) {
  try {
    (void)(ExtendedReal(1e308) + ExtendedReal(1e308));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Overflow);
  }
}

TEST(EventKey, Masks) {
  EXPECT_EQ(EventKey::full(3).mask(), 7u);
  EXPECT_TRUE(EventKey::singleton(2).is_singleton());
  EXPECT_FALSE(EventKey(3).is_singleton());
  EXPECT_FALSE(EventKey::empty().is_singleton());
  EXPECT_TRUE(EventKey(5).contains(2));
  EXPECT_FALSE(EventKey(5).contains(1));
}

TEST(SampleSpace, RejectsDuplicateLabels) {
  EXPECT_THROW(SampleSpace({"a", "a"}), Error);
  EXPECT_THROW(SampleSpace(std::vector<std::string>{}), Error);
  EXPECT_EQ(SampleSpace::indexed(3).event_count(), 8u);
}

TEST(ExpectedScore, SkipsZeroWeightInfinity) {
  EXPECT_EQ(expected_score(Probability({1.0, 0.0}), sv({-3.0, -kInf})).value(), -3.0);
  EXPECT_EQ(expected_score(Probability({0.5, 0.5}), sv({-1.0, -3.0})).value(), -2.0);
  EXPECT_TRUE(expected_score(Probability({0.5, 0.5}), sv({-kInf, 0.0})).is_neg_inf());
}

TEST(ExpectedScore, SpaceMismatch) {
  try {
    expected_score(Probability({0.5, 0.5}), sv({1.0, 2.0, 3.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpaceMismatch);
  }
}

TEST(ExtendedDot, Examples) {
  EXPECT_EQ(extended_dot(std::vector<double>{0.0, 1.0}, sv({-kInf, -1.0})).value(), -1.0);
  EXPECT_EQ(extended_dot(std::vector<double>{0.5, 0.5}, sv({-2.0, -4.0})).value(), -3.0);
  EXPECT_TRUE(extended_dot(std::vector<double>{0.5, 0.5}, sv({-kInf, -1.0})).is_neg_inf());
  EXPECT_THROW(extended_dot(std::vector<double>{1.5, 0.0}, sv({0.0, 0.0})), Error);
}

TEST(ExtendedDot, AgreesWithExpectedScore) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 0.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 2 + t % 4;
    const auto w = random_weights(rng, n, true);
    std::vector<double> g(n);
    for (auto& x : g) x = u(rng) < -4.0 ? -kInf : u(rng);
    const ScoreVector s = ScoreVector::from_doubles(g);
    const Probability p(w);
    const ExtendedReal a = expected_score(p, s);
    const ExtendedReal b = extended_dot(w, s);
    EXPECT_EQ(a.is_neg_inf(), b.is_neg_inf());
    if (a.is_finite()) {
      EXPECT_EQ(a.value(), b.value());
      EXPECT_NEAR(a.value(), naive_dot(w, s).value(), 1e-12);
    }
  }
}

TEST(ExtendedDot, Monotone) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 0.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3;
    const auto f = random_weights(rng, n, true);
    std::vector<double> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = u(rng) < -4.5 ? -kInf : u(rng);
      h[i] = std::isfinite(g[i]) ? g[i] + 0.5 * (u(rng) + 5.0) : u(rng);
    }
    EXPECT_LE(extended_dot(f, ScoreVector::from_doubles(g)), extended_dot(f, ScoreVector::from_doubles(h)));
  }
}

TEST(ExtendedDot, LipschitzInWeights) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 0.0);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + t % 3;
    const auto f = random_weights(rng, n, false);
    const auto f2 = random_weights(rng, n, false);
    std::vector<double> g(n);
    double gmax = 0.0;
    for (auto& x : g) {
      x = u(rng);
      gmax = std::max(gmax, std::abs(x));
    }
    const ScoreVector s = ScoreVector::from_doubles(g);
    const double lhs = std::abs(extended_dot(f, s).value() - extended_dot(f2, s).value());
    EXPECT_LE(lhs, static_cast<double>(n) * gmax * linf_distance(f, f2) + 1e-12);
  }
}

TEST(ExtendedDot, ContinuousAlongMonotoneSequences) {
  // g_k -> g with g(0) = -inf: where f(0) = 0 the limit is finite, else -inf
  const std::vector<double> f_zero = {0.0, 0.4, 0.6};
  const std::vector<double> f_pos = {0.2, 0.2, 0.6};
  const ScoreVector g = sv({-kInf, -1.0, -2.0});
  double prev = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const ScoreVector gk = sv({-std::pow(2.0, k), -1.0 - 1.0 / k, -2.0});
    const double a = extended_dot(f_zero, gk).value();
    EXPECT_NEAR(a, extended_dot(f_zero, g).value(), 0.4 / k + 1e-12);
    const double b = extended_dot(f_pos, gk).value();
    if (k > 1) EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_LT(prev, -1e17);
  EXPECT_TRUE(extended_dot(f_pos, g).is_neg_inf());
}

TEST(ValidateProbability, Examples) {
  try {
    validate_probability(Credence(2, {0.0, 0.6, 0.6, 1.0}), 1e-9);
    FAIL();
  } catch (const IncoherentError& e) {
    EXPECT_EQ(e.event_mask(), 3u);
    EXPECT_NEAR(std::abs(e.discrepancy()), 0.2, 1e-12);
  }
  const Probability p = validate_probability(Credence(2, {0.0, 0.5, 0.5, 1.0}), 1e-9);
  EXPECT_EQ(p[0], 0.5);
  EXPECT_EQ(p[1], 0.5);
  try {
    validate_probability(Credence(2, {0.0, -0.1, 1.1, 1.0}), 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeWeight);
  }
}

TEST(ValidateProbability, EmptySetAndNormalization) {
  EXPECT_FALSE(is_coherent(Credence(2, {0.1, 0.5, 0.5, 1.0})));
  EXPECT_FALSE(is_coherent(Credence(2, {0.0, 0.6, 0.6, 1.2})));
  EXPECT_TRUE(is_coherent(Credence(1, {0.0, 1.0})));
}

TEST(ValidateProbability, RoundTripsInducedCredence) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + t % 6;
    const Probability p(random_weights(rng, n, true));
    const Probability q = validate_probability(p.to_credence(), kCoherenceTol);
    EXPECT_LE(linf_distance(p.weights(), q.weights()), 1e-12);
    EXPECT_EQ(p.is_regular(), q.is_regular());
  }
}

TEST(Probability, Invariants) {
  EXPECT_TRUE(Probability({0.25, 0.75}).is_regular());
  EXPECT_FALSE(Probability({1.0, 0.0}).is_regular());
  EXPECT_THROW(Probability({0.5, 0.6}), Error);
  EXPECT_THROW(Probability({-0.5, 1.5}), Error);
  EXPECT_NEAR(Probability({0.2, 0.3, 0.5}).event(EventKey(5)), 0.7, 1e-15);
}

TEST(SampleSimplex, Examples) {
  const auto g = sample_simplex(2, 2, false);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0][0], 0.0);
  EXPECT_EQ(g[1][0], 0.5);
  EXPECT_EQ(g[2][0], 1.0);
  const auto interior = sample_simplex(2, 2, true);
  ASSERT_EQ(interior.size(), 1u);
  EXPECT_EQ(interior[0][1], 0.5);
  EXPECT_TRUE(sample_simplex(3, 2, true).empty());
}

TEST(SampleSimplex, CountsMatchEnumeration) {
  for (std::size_t n = 1; n <= 5; ++n) {
    for (std::size_t k = 1; k <= 9; ++k) {
      for (bool interior : {false, true}) {
        // brute force: all tuples in [0,k]^n summing to k
        std::size_t count = 0;
        std::vector<std::size_t> m(n, 0);
        while (true) {
          std::size_t s = 0;
          bool ok = true;
          for (auto x : m) {
            s += x;
            ok = ok && (!interior || x >= 1);
          }
          count += (s == k && ok);
          std::size_t i = 0;
          while (i < n && m[i] == k) m[i++] = 0;
          if (i == n) break;
          ++m[i];
        }
        EXPECT_EQ(sample_simplex(n, k, interior).size(), count) << n << " " << k;
        EXPECT_EQ(simplex_grid_size(n, k, interior), count);
      }
    }
  }
}

TEST(SampleSimplex, LexicographicAndRegular) {
  const auto g = sample_simplex(3, 5, true);
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_TRUE(std::lexicographical_compare(g[i - 1].weights().begin(), g[i - 1].weights().end(),
                                             g[i].weights().begin(), g[i].weights().end()));
  }
  for (const auto& p : g) EXPECT_TRUE(p.is_regular());
}

TEST(LinfDistance, Examples) {
  EXPECT_DOUBLE_EQ(linf_distance(sv({1.0, 2.0}), sv({1.5, 1.8})), 0.5);
  EXPECT_EQ(linf_distance(sv({-kInf, 0.0}), sv({-kInf, 0.0})), 0.0);
  EXPECT_EQ(linf_distance(sv({-kInf, 0.0}), sv({0.0, 0.0})), kInf);
}
