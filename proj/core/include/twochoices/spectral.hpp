#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "twochoices/graph.hpp"

namespace twochoices {

/// Spectrum-derived constants of a graph, for the degree-scaled adjacency
/// operator D^-1 M (computed through its symmetric similar form).
struct SpectralSummary {
  double lambda1 = 1.0;  // top eigenvalue, 1 for any graph
  double lambda = 0.0;   // largest |eigenvalue| excluding lambda1
  std::uint32_t d_min = 0;
  std::uint32_t d_max = 0;
  double L_min = 0.0;  // (1 - lambda)^2 (d_min/d_max)^3
  double L_max = 0.0;  // (1 + lambda)^2 (d_max/d_min)^3
  double Sigma_L = 0.0;
  double Delta_L = 0.0;
  double K_L = 0.0;  // 27 Delta_L^2 / (4 Sigma_L^2)
  bool bipartite = false;
  double residual = 0.0;  // ||D^-1 M 1 - 1||_inf
};

struct SpectralOptions {
  std::size_t dense_limit = 2000;
  double tolerance = 1e-8;
  std::size_t max_iterations = 200000;
  std::uint64_t seed = 0x5eed;
};

SpectralSummary spectral_summary(const Graph& g, const SpectralOptions& options = {});

/// Fills every derived constant from (lambda, d_min, d_max). Used for
/// analytic families where lambda is known in closed form.
SpectralSummary summary_from_lambda(double lambda, std::uint32_t d_min,
                                    std::uint32_t d_max);

/// Side assignment per vertex: true = S, false = T.
using Bipartition = std::vector<bool>;

Bipartition bipartition_from_mask(std::size_t n, std::uint64_t mask);
Bipartition bipartition_from_set(std::size_t n, std::span<const Vertex> s);

struct InequalityCheck {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double slack = 0.0;  // min(value - lower, upper - value); negative = violated
  bool holds = true;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  std::size_t violations = 0;
  double min_slack = 0.0;
};

/// |E(S,T) - vol(S)vol(T)/vol(V)| <= lambda vol(S)vol(T)/vol(V) per partition.
InequalityReport verify_expander_mixing(const Graph& g, const SpectralSummary& s,
                                        std::span<const Bipartition> partitions);
InequalityReport verify_expander_mixing(const Graph& g,
                                        std::span<const Bipartition> partitions);

/// L_min |S|^2|T|/n^2 <= sum_{v in T} (d_v^S/d_v)^2 <= L_max |S|^2|T|/n^2.
InequalityReport verify_sandwich(const Graph& g, const SpectralSummary& s,
                                 std::span<const Bipartition> partitions);
InequalityReport verify_sandwich(const Graph& g, std::span<const Bipartition> partitions);

/// Every proper bipartition of a graph with n <= 24, in mask order.
std::vector<Bipartition> all_bipartitions(std::size_t n);

}  // namespace twochoices
