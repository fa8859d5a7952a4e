#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace twochoices {

/// Birth-death chain on {0, ..., n}: q_plus[a] is the rate a -> a+1 and
/// q_minus[a] the rate a -> a-1, both in events per unit time.
struct BirthDeathSpec {
  std::vector<double> q_plus;
  std::vector<double> q_minus;

  std::size_t n() const noexcept { return q_plus.size() - 1; }
  /// Throws unless sizes match, rates are finite and nonnegative,
  /// q_plus[n] == 0 and q_minus[0] == 0.
  void validate() const;
  double max_total_rate() const noexcept;
};

/// Probability law over {0, ..., n}.
using Distribution = std::vector<double>;

// Count of opinion-1 nodes on the complete graph.
BirthDeathSpec complete_rates(std::size_t n, double alpha);
// Same chain under the 2k-choices rule (k = 1 gives complete_rates).
BirthDeathSpec complete_rates_2k(std::size_t n, int k, double alpha);

enum class SandwichSide {
  kUpper,  // (qbar_plus, qunder_minus): dominates A(X) from above
  kLower,  // (qunder_plus, qbar_minus)
};
BirthDeathSpec sandwich_rates(std::size_t n, double alpha, double L_min, double L_max,
                              SandwichSide side);

/// Detailed-balance solution, computed in log space. Throws kReducible when
/// an interior rate is zero.
Distribution stationary(const BirthDeathSpec& spec);

/// Law of A(t) given A(0) = a0, by uniformization (Poisson truncation below
/// 1e-15 per chunk). Large Lambda*t switches to squaring of the uniformized
/// kernel when that is cheaper.
Distribution transient(const BirthDeathSpec& spec, std::size_t a0, double t);

/// Row-stochastic matrix P(t), row a = transient(spec, a, t). Row-major,
/// (n+1)^2 entries.
std::vector<double> transition_matrix(const BirthDeathSpec& spec, double t);

double tv_distance(std::span<const double> p, std::span<const double> q);

/// d(t) = max_a0 || P_a0(A(t) in .) - pi ||_TV.
double worst_case_distance(const BirthDeathSpec& spec, std::span<const double> pi, double t);

struct MixingTime {
  double time = 0.0;
  bool cap_exceeded = false;
};
inline constexpr double kDefaultTimeCap = 1e12;

/// Smallest t with d(t) <= epsilon, to relative precision 1e-3.
MixingTime mixing_time(const BirthDeathSpec& spec, double epsilon = 0.25,
                       double t_cap = kDefaultTimeCap);

/// {floor(n/2), ceil(n/2)}, deduplicated.
std::vector<std::size_t> half_targets(std::size_t n);

/// E_a0[first hitting time of targets], exact tri-diagonal solve. Throws
/// kDivergence when some reachable state cannot reach the targets.
double expected_hitting_time(const BirthDeathSpec& spec, std::size_t a0,
                             std::span<const std::size_t> targets);

/// Copy of spec with the target states made absorbing.
BirthDeathSpec with_absorbing(const BirthDeathSpec& spec, std::span<const std::size_t> targets);

/// P_a0(T_targets <= t).
double hit_probability_by(const BirthDeathSpec& spec, std::size_t a0,
                          std::span<const std::size_t> targets, double t);

/// P_a0(hit high before low) from the scale function
/// phi(k) = sum_t prod_{j<t} q_minus(j)/q_plus(j), with log-space products.
double exit_probability(const BirthDeathSpec& spec, std::size_t a0, std::size_t low,
                        std::size_t high);

}  // namespace twochoices
