#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <map>

#include "twochoices/birth_death.hpp"
#include "twochoices/error.hpp"
#include "twochoices/oracle.hpp"
#include "twochoices/spectral.hpp"

namespace tc = twochoices;

TEST(FullChain, TriangleConsensusRate) {
  const auto c = tc::build_full_chain(tc::complete_graph(3), 0.0);
  // v0 = v1 = 1, v2 = 0: both neighbors of v2 disagree with it.
  EXPECT_DOUBLE_EQ(c.rate(0b011, 2), 1.0);
  EXPECT_DOUBLE_EQ(c.rate(0b011, 0), 0.25);
}

TEST(FullChain, PureNoise) {
  const auto c = tc::build_full_chain(tc::petersen_graph(), 1.0);
  for (double r : c.flip_rate) EXPECT_EQ(r, 0.5);
}

TEST(FullChain, PathMiddleNode) {
  const auto c = tc::build_full_chain(tc::path_graph(3), 0.5);
  EXPECT_DOUBLE_EQ(c.rate(0b001, 1), 0.375);
}

TEST(FullChain, SizeCap) {
  try {
    tc::build_full_chain(tc::cycle_graph(13), 0.5);
    FAIL();
  } catch (const tc::Error& e) {
    EXPECT_EQ(e.code(), tc::ErrorCode::kSizeCap);
  }
  EXPECT_NO_THROW(tc::build_full_chain(tc::cycle_graph(12), 0.5));
}

TEST(FullStationary, ReducibleWithoutNoise) {
  EXPECT_THROW(tc::full_stationary(tc::build_full_chain(tc::complete_graph(4), 0.0)), tc::Error);
}

TEST(FullStationary, ComplementSymmetryAndMean) {
  for (const auto& g : {tc::path_graph(5), tc::star_graph(5), tc::petersen_graph()}) {
    for (double alpha : {0.2, 0.5, 0.8}) {
      const auto c = tc::build_full_chain(g, alpha);
      const auto pi = tc::full_stationary(c);
      const std::uint32_t all = std::uint32_t(c.states() - 1);
      double mean = 0;
      for (std::uint32_t x = 0; x < c.states(); ++x) {
        EXPECT_NEAR(pi[x], pi[all ^ x], 1e-12);
        mean += std::popcount(x) * pi[x];
      }
      EXPECT_NEAR(mean, g.size() / 2.0, 1e-12);
    }
  }
}

TEST(FullStationary, SatisfiesGlobalBalance) {
  const auto c = tc::build_full_chain(tc::cycle_graph(7), 0.3);
  const auto pi = tc::full_stationary(c);
  for (std::uint32_t y = 0; y < c.states(); ++y) {
    double in = 0;
    for (std::size_t v = 0; v < c.n; ++v) {
      const std::uint32_t x = y ^ (1U << v);
      in += pi[x] * c.rate(x, v);
    }
    EXPECT_NEAR(in, pi[y] * c.exit_rate(y), 1e-14);
  }
}

TEST(Lumpability, CompleteGraphMarginal) {
  for (std::size_t n = 3; n <= 9; ++n) {
    const auto c = tc::build_full_chain(tc::complete_graph(n), 0.35);
    EXPECT_TRUE(tc::is_lumpable(c));
    const auto marginal = tc::count_marginal(n, tc::full_stationary(c));
    const auto pi = tc::stationary(tc::complete_rates(n, 0.35));
    for (std::size_t a = 0; a <= n; ++a) EXPECT_NEAR(marginal[a], pi[a], 1e-10);
  }
  EXPECT_FALSE(tc::is_lumpable(tc::build_full_chain(tc::path_graph(4), 0.35)));
}

TEST(FullTransient, Limits) {
  const auto c = tc::build_full_chain(tc::cycle_graph(6), 0.4);
  const auto p0 = tc::full_transient(c, 5, 0.0);
  for (std::uint32_t x = 0; x < c.states(); ++x) EXPECT_EQ(p0[x], x == 5 ? 1.0 : 0.0);
  EXPECT_LT(tc::tv_distance(tc::full_transient(c, 0, 500.0), tc::full_stationary(c)), 1e-8);
}

TEST(FullTransient, MarginalMatchesCountChain) {
  const std::size_t n = 6;
  const auto c = tc::build_full_chain(tc::complete_graph(n), 0.3);
  const auto s = tc::complete_rates(n, 0.3);
  for (double t : {0.1, 1.0, 10.0}) {
    const auto m = tc::count_marginal(n, tc::full_transient(c, 0b000111, t));
    EXPECT_LT(tc::tv_distance(m, tc::transient(s, 3, t)), 1e-10);
  }
}

TEST(FullMixing, ProjectionContracts) {
  const std::size_t n = 6;
  const auto full = tc::full_mixing_time(tc::build_full_chain(tc::complete_graph(n), 0.4));
  const auto count = tc::mixing_time(tc::complete_rates(n, 0.4));
  EXPECT_GE(full.time * (1 + 2e-3), count.time);
}

TEST(Catalog, Contents) {
  const auto& cat = tc::graph_catalog();
  std::map<std::size_t, int> by_size;
  for (const auto& e : cat) by_size[e.graph.size()]++;
  // Connected graphs up to isomorphism: 1, 2, 6, 21, 112.
  EXPECT_EQ(by_size[2], 1);
  EXPECT_EQ(by_size[3], 2);
  EXPECT_EQ(by_size[4], 6);
  EXPECT_EQ(by_size[5], 21);
  EXPECT_EQ(by_size[6], 112);
  EXPECT_EQ(cat.size(), 142u + 4u);
  EXPECT_EQ(cat.back().name, "Petersen");
}

TEST(RateSandwich, HoldsWhereBipartitionBoundHolds) {
  for (const auto& e : tc::graph_catalog()) {
    const auto s = tc::spectral_summary(e.graph);
    if (s.bipartite) continue;
    const auto part = tc::verify_sandwich(e.graph, s, tc::all_bipartitions(e.graph.size()));
    const auto chain = tc::build_full_chain(e.graph, 0.3);
    const auto rates = tc::check_rate_sandwich(chain, s.L_min, s.L_max);
    EXPECT_EQ(rates.states_checked, chain.states());
    // Every state corresponds to a bipartition (plus the two consensus states),
    // so a rate breach exists exactly when a bipartition bound fails.
    EXPECT_EQ(rates.violations == 0, part.violations == 0) << e.name;
  }
}
