#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "twochoices/birth_death.hpp"
#include "twochoices/drift.hpp"
#include "twochoices/error.hpp"

namespace tc = twochoices;

namespace {

// Closed-form smaller root of the complete-graph drift at finite n.
double r_closed(std::size_t n, double alpha) {
  const double m = 1.0 - 1.0 / double(n);
  return 0.5 * (1.0 - std::sqrt(1.0 - 2.0 * alpha / (1.0 - alpha) * m * m));
}

double r_limit(double alpha) {
  return 0.5 * (1.0 - std::sqrt((1.0 - 3.0 * alpha) / (1.0 - alpha)));
}

// n -> infinity form of the complete-graph drift.
double f_limit(double y, double alpha) {
  return (1 - 2 * y) * alpha / 2 - (1 - alpha) * y * (1 - y) * (1 - 2 * y);
}

void expect_symmetric(const tc::DriftProfile& p) {
  const auto& r = p.roots;
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_NEAR(r[i].value, 1.0 - r[r.size() - 1 - i].value, 1e-12);
    if (i > 0) EXPECT_LT(r[i - 1].value, r[i].value);
  }
}

}  // namespace

TEST(FComplete, Values) {
  for (std::size_t n : {2u, 10u, 1000u}) EXPECT_EQ(tc::f_complete(0.5, n, 0.3), 0.0);
  const double b = (100.0 / 99.0) * (100.0 / 99.0);
  EXPECT_NEAR(tc::f_complete(0.25, 100, 0.2), 0.5 * 0.1 - 0.8 * b * 0.25 * 0.75 * 0.5, 1e-15);
  EXPECT_NEAR(tc::f_complete(0.25, 100, 0.2), -0.0265228, 1e-7);
  EXPECT_NEAR(tc::f_complete(0.3, 50, 0.25), -tc::f_complete(0.7, 50, 0.25), 1e-15);
}

TEST(RootsComplete, MatchesClosedForm) {
  for (std::size_t n : {10u, 50u, 100u, 1000u}) {
    for (double alpha : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
      if (alpha >= tc::complete_threshold(n)) continue;
      const auto p = tc::roots_complete(n, alpha);
      ASSERT_EQ(p.roots.size(), 3u) << n << " " << alpha;
      EXPECT_NEAR(p.roots[0].value, r_closed(n, alpha), 1e-9);
      EXPECT_NEAR(p.roots[1].value, 0.5, 1e-12);
      EXPECT_EQ(p.roots[0].stability, tc::Stability::kAttracting);
      EXPECT_EQ(p.roots[1].stability, tc::Stability::kRepelling);
      for (const auto& r : p.roots) EXPECT_LT(std::abs(tc::f_complete(r.value, n, alpha)), 1e-10);
      expect_symmetric(p);
    }
  }
}

TEST(RootsComplete, LargeNApproachesLimit) {
  EXPECT_NEAR(r_limit(0.2), 0.1464466, 1e-7);
  EXPECT_NEAR(tc::roots_complete(1'000'000, 0.2).roots[0].value, r_limit(0.2), 1e-6);
}

TEST(RootsComplete, AboveThresholdSingleRoot) {
  const auto p = tc::roots_complete(100, 0.4);
  ASSERT_EQ(p.roots.size(), 1u);
  EXPECT_EQ(p.roots[0].value, 0.5);
  EXPECT_EQ(p.roots[0].stability, tc::Stability::kAttracting);
  const double b = (100.0 / 99.0) * (100.0 / 99.0);
  EXPECT_NEAR(p.contraction, 0.1 - 0.3 * (b - 1), 1e-15);
  EXPECT_GT(p.contraction, 0.0);
}

TEST(RootsComplete, NearBoundaryCollapses) {
  const std::size_t n = 1'000'000;
  const double th = tc::complete_threshold(n);
  const auto at = tc::roots_complete(n, th);
  EXPECT_TRUE(at.degenerate);
  ASSERT_EQ(at.roots.size(), 1u);
  EXPECT_EQ(at.roots[0].value, 0.5);
  const auto below = tc::roots_complete(n, th - 1e-4);
  ASSERT_EQ(below.roots.size(), 3u);
  EXPECT_GT(below.roots[0].value, 0.45);
}

TEST(RootsComplete, ContractionInequality) {
  for (std::size_t n : {100u, 500u}) {
    for (double alpha : {0.35, 0.5, 0.8}) {
      const double c = tc::complete_contraction(n, alpha);
      for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= i; ++j) {
          const double y = i / 100.0;
          const double yp = j / 100.0;
          EXPECT_LE(tc::f_complete(y, n, alpha) - tc::f_complete(yp, n, alpha),
                    -c * (y - yp) + 1e-14);
        }
      }
    }
  }
}

TEST(FGeneral, Values) {
  EXPECT_EQ(tc::F_general(0.5, 0.3, 2.0, 0.0), 0.0);
  const double y = 0.75;
  const double s = 2.0406;
  const double d = 0.5650;
  const double expect = (1 - 2 * y) * (y * y - y + 0.5 / (s * 0.5)) + d / (4 * s);
  EXPECT_NEAR(tc::F_general(y, 0.5, s, d), expect, 1e-15);
}

TEST(FGeneral, CompleteLimitRoots) {
  const auto p = tc::roots_general(0.2, 2.0, 0.0);
  ASSERT_EQ(p.roots.size(), 3u);
  // y^2 - y + 0.2 / (2 * 0.8) = 0.
  const double q = 0.5 * (1 - std::sqrt(1 - 4 * 0.125));
  EXPECT_NEAR(p.roots[0].value, q, 1e-12);
  EXPECT_NEAR(p.roots[2].value, 1 - q, 1e-12);
  EXPECT_NEAR(p.roots[0].value, r_limit(0.2), 1e-12);
}

TEST(FGeneral, RootsSolve) {
  for (double alpha : {0.02, 0.05, 0.1, 0.2}) {
    for (double delta : {0.0, 0.05, 0.2}) {
      const auto p = tc::roots_general(alpha, 2.1, delta);
      for (const auto& r : p.roots) {
        EXPECT_LT(std::abs(tc::F_general(r.value, alpha, 2.1, delta)), 1e-10);
        EXPECT_GE(r.value, 0.0);
        EXPECT_LE(r.value, 1.0);
      }
    }
  }
}

TEST(Thresholds, RegularDegree200) {
  const double lambda = 2.0 * std::sqrt(199.0) / 200.0;
  const auto s = tc::summary_from_lambda(lambda, 200, 200);
  const auto t = tc::thresholds_general(s, 0.05);
  const double k = 27 * s.Delta_L * s.Delta_L / (4 * s.Sigma_L * s.Sigma_L);
  EXPECT_NEAR(t.K_L, k, 1e-15);
  EXPECT_NEAR(t.K_L, 0.51654, 1e-4);
  ASSERT_TRUE(t.alpha_meta_threshold);
  EXPECT_NEAR(*t.alpha_meta_threshold, 0.09, 0.005);
  EXPECT_EQ(t.regime, tc::Regime::kMetastable);
  ASSERT_TRUE(t.r_lower && t.r_smaller);
  EXPECT_LT(*t.r_smaller, *t.r_lower);
  EXPECT_LT(*t.r_lower, 0.5);
  EXPECT_LT(std::abs(tc::F_general(*t.r_lower, 0.05, s.Sigma_L, s.Delta_L)), 1e-10);
}

TEST(Thresholds, CompleteGraphLimit) {
  const auto t = tc::thresholds_general(1.0, 1.0, 0.2);
  ASSERT_TRUE(t.alpha_meta_threshold);
  EXPECT_NEAR(*t.alpha_meta_threshold, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(tc::thresholds_general(1.0, 1.0, 1.0 / 3.0).c_alpha_L, 0.0, 1e-15);
  const auto close = tc::thresholds_general(1.0 - 1e-7, 1.0 + 1e-7, 0.2);
  EXPECT_NEAR(*close.alpha_meta_threshold, 1.0 / 3.0, 1e-4);
}

TEST(Thresholds, FastRegime) {
  const auto t = tc::thresholds_general((2.0406 - 0.5650) / 2, (2.0406 + 0.5650) / 2, 0.5);
  EXPECT_EQ(t.regime, tc::Regime::kFast);
  EXPECT_NEAR(t.c_alpha_L, 0.9797, 1e-4);
  ASSERT_TRUE(t.epsilon_L);
  EXPECT_NEAR(*t.epsilon_L, 0.2883, 1e-4);
  EXPECT_NEAR(*t.epsilon_L * t.c_alpha_L, 0.5 * 0.5650, 1e-12);
}

TEST(Thresholds, LargeKFlagsUndefined) {
  const auto t = tc::thresholds_general(0.01, 10.0, 0.05);
  EXPECT_TRUE(t.threshold_undefined);
  EXPECT_FALSE(t.alpha_meta_threshold);
  EXPECT_EQ(t.regime, tc::Regime::kIndeterminate);
}

TEST(Thresholds, DegenerateInput) {
  EXPECT_THROW(tc::thresholds_general(0.0, 4.0, 0.2), tc::Error);
  EXPECT_THROW(tc::thresholds_general(tc::spectral_summary(tc::star_graph(4)), 0.2), tc::Error);
}

// Above the fast threshold F is bounded by a line through
// y* = (1 + (1-alpha) Delta / c) / 2. The slope that follows from
// y(1-y) <= 1/4 is c / (2 Sigma (1-alpha)); the printed statement carries
// 2c / (Sigma (1-alpha)), four times steeper, which fails below zero.
TEST(FGeneral, ContractionBound) {
  for (double alpha : {0.5, 0.7}) {
    for (double delta : {0.1, 0.5}) {
      const double sigma = 2.04;
      const double c = alpha * (4 + sigma) - sigma;
      ASSERT_GT(c, 0.0);
      const double y_star = 0.5 * (1 + (1 - alpha) * delta / c);
      for (int i = 1; i < 100; ++i) {
        const double y = 0.5 + i / 200.0;
        const double bound = c / (2 * sigma * (1 - alpha)) * (y_star - y);
        EXPECT_LE(tc::F_general(y, alpha, sigma, delta), bound + 1e-12);
      }
    }
  }
}

TEST(FGeneral, PrintedContractionSlopeTooSteep) {
  const double alpha = 0.5;
  const double sigma = 2.04;
  const double delta = 0.1;
  const double c = alpha * (4 + sigma) - sigma;
  const double y = 0.9;
  const double printed =
      2 * c / (sigma * (1 - alpha)) * (0.5 * (1 + (1 - alpha) * delta / c) - y);
  EXPECT_GT(tc::F_general(y, alpha, sigma, delta), printed);
}

TEST(FGeneral, BoundsSandwichDrift) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + std::size_t(u(rng) * 200);
    const double alpha = 0.05 + 0.9 * u(rng);
    const double lmin = 0.1 + 0.9 * u(rng);
    const double lmax = lmin + 3.0 * u(rng);
    const auto up = tc::sandwich_rates(n, alpha, lmin, lmax, tc::SandwichSide::kUpper);
    for (std::size_t a = 0; a <= n; ++a) {
      const double f = tc::F_general(double(a) / double(n), alpha, lmin + lmax, lmax - lmin);
      const double bound = double(n) * (1 - alpha) * (lmin + lmax) / 2 * f;
      EXPECT_LE(up.q_plus[a] - up.q_minus[a], bound + 1e-9 * double(n));
    }
  }
}

TEST(Choices2k, ReducesToLimitDrift) {
  for (double alpha : {0.1, 0.2, 0.5, 0.9}) {
    for (int i = 0; i <= 100; ++i) {
      const double y = i / 100.0;
      EXPECT_NEAR(tc::f_2k(y, 1, alpha), f_limit(y, alpha), 1e-12);
    }
  }
}

TEST(Choices2k, EndpointsAndAntisymmetry) {
  for (int k = 1; k <= 8; ++k) {
    EXPECT_NEAR(tc::f_2k(0.0, k, 0.3), 0.15, 1e-15);
    for (int i = 0; i < 100; ++i) {
      const double y = (i + 0.5) / 100.0;
      EXPECT_NEAR(tc::f_2k(y, k, 0.3), -tc::f_2k(1 - y, k, 0.3), 1e-13);
    }
  }
}

TEST(Choices2k, Thresholds) {
  EXPECT_EQ(tc::alpha_2k(1), 1.0 / 3.0);
  EXPECT_NEAR(tc::alpha_2k(2), 7.0 / 15.0, 1e-15);
  for (int k = 2; k <= 10; ++k) EXPECT_GT(tc::alpha_2k(k), tc::alpha_2k(k - 1));
  EXPECT_EQ(tc::binomial(4, 2), 6u);
  EXPECT_EQ(tc::binomial(60, 30), 118264581564861424ULL);
}

TEST(Choices2k, Roots) {
  const auto p1 = tc::roots_2k(1, 0.2);
  ASSERT_EQ(p1.roots.size(), 3u);
  EXPECT_NEAR(p1.roots[0].value, r_limit(0.2), 1e-12);

  const auto p2 = tc::roots_2k(2, 0.5);
  ASSERT_EQ(p2.roots.size(), 1u);
  EXPECT_EQ(p2.roots[0].value, 0.5);
  EXPECT_GT(p2.contraction, 0.0);

  for (int k = 1; k <= 10; ++k) {
    for (double alpha : {0.05, 0.2, 0.4, 0.6}) {
      const auto p = tc::roots_2k(k, alpha);
      EXPECT_EQ(p.roots.size(), alpha < tc::alpha_2k(k) ? 3u : 1u) << k << " " << alpha;
      for (const auto& r : p.roots) EXPECT_LT(std::abs(tc::f_2k(r.value, k, alpha)), 1e-10);
      expect_symmetric(p);
    }
  }
  EXPECT_TRUE(tc::roots_2k(3, tc::alpha_2k(3)).degenerate);
}
