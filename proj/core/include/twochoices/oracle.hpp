#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "twochoices/birth_death.hpp"
#include "twochoices/graph.hpp"

namespace twochoices {

inline constexpr std::size_t kOracleMaxN = 12;

/// Full generator on {0,1}^n, states indexed by bitmask (bit v = opinion of
/// v). Only single-bit flips have nonzero rate.
struct FullChain {
  std::size_t n = 0;
  double alpha = 0.0;
  std::vector<double> flip_rate;  // flip_rate[x * n + v]

  std::size_t states() const noexcept { return std::size_t{1} << n; }
  double rate(std::uint32_t x, std::size_t v) const noexcept { return flip_rate[x * n + v]; }
  double exit_rate(std::uint32_t x) const noexcept;
};

/// Throws kSizeCap when g has more than 12 vertices.
FullChain build_full_chain(const Graph& g, double alpha);

/// Global balance by GTH elimination. Throws kReducible when alpha == 0.
std::vector<double> full_stationary(const FullChain& chain);

std::vector<double> full_transient(const FullChain& chain, std::uint32_t x0, double t);

/// max over all 2^n initial states of the TV distance to pi.
double full_worst_case_distance(const FullChain& chain, const std::vector<double>& pi, double t);

MixingTime full_mixing_time(const FullChain& chain, double epsilon = 0.25,
                            double t_cap = kDefaultTimeCap);

/// Law of A(X) under a law on full states.
Distribution count_marginal(std::size_t n, const std::vector<double>& law);

/// True when the total up- and down-flip rates out of every state depend on
/// the state only through A(x), within tol.
bool is_lumpable(const FullChain& chain, double tol = 1e-12);

struct RateSandwichReport {
  std::size_t states_checked = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  // largest relative breach of a bound
};

/// Checks qunder_plus(A(x)) <= q_plus(x) <= qbar_plus(A(x)) and the death
/// analogue for every state.
RateSandwichReport check_rate_sandwich(const FullChain& chain, double L_min, double L_max);

struct CatalogEntry {
  std::string name;
  Graph graph;
};

/// Every connected graph on 2..6 vertices up to isomorphism, then K7, K8,
/// C7 and the Petersen graph.
const std::vector<CatalogEntry>& graph_catalog();

}  // namespace twochoices
