#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "twochoices/error.hpp"
#include "twochoices/oracle.hpp"
#include "twochoices/spectral.hpp"

namespace tc = twochoices;

namespace {

std::vector<tc::Bipartition> random_bipartitions(std::size_t n, std::size_t count,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<tc::Bipartition> out;
  while (out.size() < count) {
    tc::Bipartition p(n);
    std::size_t in_s = 0;
    for (std::size_t v = 0; v < n; ++v) in_s += (p[v] = (rng() & 1) != 0);
    if (in_s > 0 && in_s < n) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST(SpectralSummary, CompleteGraphs) {
  for (std::size_t n : {3u, 4u, 7u, 20u, 50u}) {
    const auto s = tc::spectral_summary(tc::complete_graph(n));
    EXPECT_NEAR(s.lambda, 1.0 / double(n - 1), 1e-8) << n;
    EXPECT_NEAR(s.lambda1, 1.0, 1e-8);
    EXPECT_FALSE(s.bipartite);
  }
}

TEST(SpectralSummary, StarIsBipartite) {
  const auto s = tc::spectral_summary(tc::star_graph(4));
  EXPECT_NEAR(s.lambda, 1.0, 1e-8);
  EXPECT_TRUE(s.bipartite);
  EXPECT_NEAR(s.L_min, 0.0, 1e-12);
}

TEST(SpectralSummary, OddCyclesAndPetersen) {
  // Cycle eigenvalues are cos(2 pi j / n); for odd n the extreme one is -cos(pi/n).
  for (std::size_t n : {5u, 7u, 11u, 31u}) {
    const auto s = tc::spectral_summary(tc::cycle_graph(n));
    EXPECT_NEAR(s.lambda, std::cos(std::numbers::pi / double(n)), 1e-8) << n;
  }
  // Adjacency spectrum {3, 1, -2} scaled by 1/3.
  EXPECT_NEAR(tc::spectral_summary(tc::petersen_graph()).lambda, 2.0 / 3.0, 1e-8);
}

TEST(SpectralSummary, DerivedConstantsFollowFromFields) {
  const auto g = tc::erdos_renyi(120, 2.0 * std::log(120.0), 3);
  const auto s = tc::spectral_summary(g);
  const double ratio = double(s.d_max) / double(s.d_min);
  EXPECT_EQ(s.d_min, g.min_degree());
  EXPECT_EQ(s.d_max, g.max_degree());
  EXPECT_DOUBLE_EQ(s.L_max, (1 + s.lambda) * (1 + s.lambda) * ratio * ratio * ratio);
  EXPECT_DOUBLE_EQ(s.L_min, (1 - s.lambda) * (1 - s.lambda) / (ratio * ratio * ratio));
  EXPECT_DOUBLE_EQ(s.Sigma_L, s.L_max + s.L_min);
  EXPECT_DOUBLE_EQ(s.Delta_L, s.L_max - s.L_min);
  EXPECT_DOUBLE_EQ(s.K_L, 27 * s.Delta_L * s.Delta_L / (4 * s.Sigma_L * s.Sigma_L));
  EXPECT_GE(s.Delta_L, 0.0);
}

TEST(SpectralSummary, TopEigenvectorResidual) {
  for (const auto& g : {tc::erdos_renyi(200, 10.6, 1), tc::random_regular(150, 10, 2),
                        tc::petersen_graph(), tc::path_graph(9)}) {
    const auto s = tc::spectral_summary(g);
    EXPECT_NEAR(s.lambda1, 1.0, 1e-8);
    EXPECT_LT(s.residual, 1e-10);
  }
}

TEST(SpectralSummary, IterativeRouteMatchesDense) {
  tc::SpectralOptions iterative;
  iterative.dense_limit = 0;
  for (const auto& g : {tc::erdos_renyi(300, 11.4, 4), tc::random_regular(300, 10, 4),
                        tc::cycle_graph(41)}) {
    const auto dense = tc::spectral_summary(g);
    const auto iter = tc::spectral_summary(g, iterative);
    EXPECT_NEAR(dense.lambda, iter.lambda, 1e-6);
  }
}

TEST(SpectralSummary, LargeDegreeRegularNearRamanujan) {
  const auto s = tc::spectral_summary(tc::random_regular(1000, 200, 11));
  const double ramanujan = 2.0 * std::sqrt(199.0) / 200.0;
  EXPECT_NEAR(s.lambda, ramanujan, 0.02);
  EXPECT_DOUBLE_EQ(s.L_max, (1 + s.lambda) * (1 + s.lambda));
  EXPECT_DOUBLE_EQ(s.L_min, (1 - s.lambda) * (1 - s.lambda));
}

TEST(ExpanderMixing, TriangleIsTight) {
  const auto g = tc::complete_graph(3);
  const std::vector<tc::Vertex> s_set{0};
  const std::vector<tc::Bipartition> parts{tc::bipartition_from_set(3, s_set)};
  const auto rep = tc::verify_expander_mixing(g, parts);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.checks[0].value, 2.0);
  EXPECT_NEAR(rep.checks[0].upper, 8.0 / 6.0 + 0.5 * 8.0 / 6.0, 1e-12);
  EXPECT_NEAR(rep.checks[0].slack, 0.0, 1e-9);
  EXPECT_TRUE(rep.checks[0].holds);
}

TEST(ExpanderMixing, AllBipartitionsOfK4) {
  // 7 unordered splits, each listed with both orientations.
  const auto parts = tc::all_bipartitions(4);
  EXPECT_EQ(parts.size(), 14u);
  EXPECT_EQ(tc::verify_expander_mixing(tc::complete_graph(4), parts).violations, 0u);
}

TEST(Partitions, EmptySideRejected) {
  const auto g = tc::complete_graph(4);
  const std::vector<tc::Bipartition> all_s{tc::Bipartition(4, true)};
  const std::vector<tc::Bipartition> none{tc::Bipartition(4, false)};
  const std::vector<tc::Bipartition> wrong_size{tc::Bipartition(3, true)};
  for (const auto* parts : {&all_s, &none, &wrong_size}) {
    EXPECT_THROW(tc::verify_expander_mixing(g, *parts), tc::Error);
    EXPECT_THROW(tc::verify_sandwich(g, *parts), tc::Error);
  }
}

TEST(Sandwich, CompleteGraphUpperBoundIsTight) {
  const std::size_t n = 5;
  const auto rep = tc::verify_sandwich(tc::complete_graph(n), tc::all_bipartitions(n));
  EXPECT_EQ(rep.violations, 0u);
  const auto parts = tc::all_bipartitions(n);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    double s = 0;
    for (bool b : parts[i]) s += b;
    const double t = double(n) - s;
    EXPECT_NEAR(rep.checks[i].value, t * (s / (n - 1)) * (s / (n - 1)), 1e-12);
    EXPECT_NEAR(rep.checks[i].upper, rep.checks[i].value, 1e-12);
  }
}

TEST(Sandwich, SingleEdge) {
  const auto g = tc::complete_graph(2);
  const std::vector<tc::Vertex> s_set{0};
  const std::vector<tc::Bipartition> parts{tc::bipartition_from_set(2, s_set)};
  const auto rep = tc::verify_sandwich(g, parts);
  EXPECT_DOUBLE_EQ(rep.checks[0].value, 1.0);
  EXPECT_NEAR(rep.checks[0].lower, 0.0, 1e-12);
  EXPECT_NEAR(rep.checks[0].upper, 1.0, 1e-12);
  EXPECT_TRUE(rep.checks[0].holds);
}

TEST(ExpanderMixing, ExhaustiveOverCatalog) {
  for (const auto& entry : tc::graph_catalog()) {
    const auto rep =
        tc::verify_expander_mixing(entry.graph, tc::all_bipartitions(entry.graph.size()));
    EXPECT_EQ(rep.violations, 0u) << entry.name;
  }
}

TEST(ExpanderMixing, RandomBipartitionsOfLargerGraphs) {
  for (const auto& g : {tc::complete_graph(50), tc::erdos_renyi(100, 9.2, 1),
                        tc::random_regular(100, 10, 1)}) {
    const auto parts = random_bipartitions(g.size(), 1000, 17);
    EXPECT_EQ(tc::verify_expander_mixing(g, parts).violations, 0u);
  }
}

TEST(Sandwich, ExhaustiveSmallGraphs) {
  for (const auto& entry : tc::graph_catalog()) {
    if (entry.name == "C7" || entry.name == "Petersen") continue;
    const auto rep = tc::verify_sandwich(entry.graph, tc::all_bipartitions(entry.graph.size()));
    EXPECT_EQ(rep.violations, 0u) << entry.name;
  }
}

TEST(Sandwich, KnownCounterexamplesAreDetected) {
  // On C7 a single vertex in S gives its two neighbors 1/4 each: 0.5 against
  // an upper bound of L_max * 6 / 49 ~ 0.4425.
  const auto c7 = tc::cycle_graph(7);
  const auto rep = tc::verify_sandwich(c7, tc::all_bipartitions(7));
  EXPECT_GT(rep.violations, 0u);
  EXPECT_LT(rep.min_slack, 0.0);
}

TEST(Sandwich, RandomBipartitionsOfDenseGraphs) {
  for (const auto& g : {tc::complete_graph(50), tc::erdos_renyi(100, 9.2, 1)}) {
    const auto parts = random_bipartitions(g.size(), 1000, 23);
    EXPECT_EQ(tc::verify_sandwich(g, parts).violations, 0u);
  }
}
