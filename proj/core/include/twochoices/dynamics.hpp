#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "twochoices/graph.hpp"
#include "twochoices/rng.hpp"

namespace twochoices {

/// Opinion vector with a cached count of 1-opinions.
class OpinionState {
 public:
  static OpinionState zeros(std::size_t n);
  static OpinionState ones(std::size_t n);
  /// Exactly round(p * n) ones at uniformly random positions.
  static OpinionState with_fraction(std::size_t n, double p, std::uint64_t seed);
  static OpinionState from_bits(std::vector<std::uint8_t> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t count_ones() const noexcept { return ones_; }
  std::uint8_t operator[](std::size_t v) const noexcept { return bits_[v]; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  void set(std::size_t v, std::uint8_t bit) noexcept {
    ones_ += std::size_t(bit) - std::size_t(bits_[v]);
    bits_[v] = bit;
  }

  std::size_t recount() const noexcept;
  bool verify() const noexcept { return recount() == ones_; }
  OpinionState complement() const;

  friend bool operator==(const OpinionState&, const OpinionState&) = default;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t ones_ = 0;
};

inline constexpr int kMaxK = 30;

struct SimConfig {
  double alpha = 0.0;
  int k = 1;  // 2k samples per update
  std::uint64_t seed = 0;
  double t_max = 1.0;
  std::vector<std::size_t> stop_levels;  // stop when A(X(t)) hits any of these
  std::size_t record_stride = 0;         // 0 disables the trajectory
  // Recount the cached A every this many events; 0 disables. Debug builds
  // default to 10^6.
#ifdef NDEBUG
  std::uint64_t verify_every = 0;
#else
  std::uint64_t verify_every = 1'000'000;
#endif
  void validate(std::size_t n) const;
};

struct RunRecord {
  std::optional<double> hit_time;
  bool censored = false;
  double end_time = 0.0;
  std::vector<std::pair<double, std::size_t>> trajectory;  // (t, A)
  std::uint64_t events = 0;
  std::uint64_t seed = 0;
  std::size_t final_ones = 0;
};

/// Randomness consumed by one update event.
struct UpdateDraw {
  Vertex node = 0;
  bool failure = false;
  std::uint8_t failure_bit = 0;
  std::array<Vertex, 2 * kMaxK> samples{};
};

void draw_update(const Graph& g, double alpha, int k, Rng& rng, UpdateDraw& draw);

/// Applies a drawn update; returns true if the node's opinion changed.
/// Majority over the 2k samples plus the node itself (2k + 1 votes, no ties).
bool apply_update(const Graph& g, OpinionState& state, const UpdateDraw& draw, int k);

/// Event-driven run on a global rate-n clock. Deterministic in
/// (g, initial, cfg.seed).
RunRecord run(const Graph& g, const OpinionState& initial, const SimConfig& cfg);

struct BatchSummary {
  std::size_t replicates = 0;
  std::size_t hits = 0;
  std::size_t censored_count = 0;
  double mean = 0.0;    // over uncensored runs only
  double std_error = 0.0;
  // Mean with censored runs counted at t_max: a lower bound on the true mean.
  double censored_lower_mean = 0.0;
};

struct BatchResult {
  std::vector<RunRecord> runs;
  BatchSummary summary;
};

/// Replicate i runs with seed derive_seed(cfg.seed, i).
BatchResult run_batch(const Graph& g, const OpinionState& initial, const SimConfig& cfg,
                      std::size_t replicates, unsigned threads = 0);

BatchSummary summarize(const std::vector<RunRecord>& runs, double t_max);

/// Exponential clocks for one step of the coupled pair started in equal
/// states A(x) = Abar. Z1 fires a birth in both chains, Z2 a birth of the
/// bound chain only, Zbar1 a death in both, Zbar2 a death of X only. The
/// earliest clock decides the step.
struct CoupledClocks {
  double z1 = 0.0;
  double z2 = 0.0;
  double zbar1 = 0.0;
  double zbar2 = 0.0;

  double x_birth() const noexcept { return z1; }
  double bound_birth() const noexcept { return z1 < z2 ? z1 : z2; }
  double bound_death() const noexcept { return zbar1; }
  double x_death() const noexcept { return zbar1 < zbar2 ? zbar1 : zbar2; }
};

/// Throws kSandwichViolation if q_plus_x > q_bar_plus or q_minus_x <
/// q_under_minus beyond rounding.
CoupledClocks sample_coupled_clocks(double q_plus_x, double q_bar_plus, double q_minus_x,
                                    double q_under_minus, Rng& rng);

struct CouplingReport {
  std::uint64_t violations = 0;  // events after which Abar < A(X)
  long max_gap = 0;              // max of Abar - A(X)
  std::vector<std::pair<double, long>> gap_trajectory;
  std::uint64_t events = 0;
  std::uint64_t equal_state_steps = 0;
  double end_time = 0.0;
};

/// Co-evolves X on g and the upper sandwich chain Abar from Abar(0) = A(X(0)).
CouplingReport run_coupled(const Graph& g, const OpinionState& initial, double alpha,
                           double L_min, double L_max, std::uint64_t seed, double t_max,
                           std::size_t record_stride = 0);

}  // namespace twochoices
