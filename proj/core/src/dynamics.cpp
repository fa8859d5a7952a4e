#include "twochoices/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "twochoices/birth_death.hpp"
#include "twochoices/error.hpp"
#include "twochoices/parallel.hpp"

namespace twochoices {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

double clock(Rng& rng, double rate) { return rate > 0.0 ? exponential(rng, rate) : kInf; }

void check_state(const Graph& g, const OpinionState& s) {
  if (s.size() != g.size()) {
    invalid("initial state has " + std::to_string(s.size()) + " entries, graph has " +
            std::to_string(g.size()) + " vertices");
  }
}

// Opinion vector plus per-vertex counts of 1-neighbors, for exact flip rates.
class RatedState {
 public:
  RatedState(const Graph& g, const OpinionState& s, double alpha)
      : g_(g), state_(s), alpha_(alpha), ones_nb_(g.size(), 0) {
    for (Vertex v = 0; v < g.size(); ++v) {
      for (Vertex u : g.neighbors(v)) ones_nb_[v] += s[u];
    }
  }

  const OpinionState& state() const noexcept { return state_; }
  std::size_t ones() const noexcept { return state_.count_ones(); }

  double flip_rate(Vertex v) const noexcept {
    const double d = g_.degree(v);
    const double agree_other = state_[v] ? d - ones_nb_[v] : ones_nb_[v];
    const double frac = agree_other / d;
    return 0.5 * alpha_ + (1.0 - alpha_) * frac * frac;
  }

  // Total rate of 0 -> 1 flips (q+(x)) and of 1 -> 0 flips (q-(x)).
  std::pair<double, double> totals() const noexcept {
    double up = 0.0;
    double down = 0.0;
    for (Vertex v = 0; v < g_.size(); ++v) (state_[v] ? down : up) += flip_rate(v);
    return {up, down};
  }

  // Flips a vertex holding `from`, chosen with probability proportional to
  // its flip rate; `total` is the matching entry of totals().
  void flip_weighted(std::uint8_t from, double total, Rng& rng) {
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    Vertex last = 0;
    for (Vertex v = 0; v < g_.size(); ++v) {
      if (state_[v] != from) continue;
      last = v;
      acc += flip_rate(v);
      if (acc > target) break;
    }
    set(last, std::uint8_t(1 - from));
  }

  void apply(const UpdateDraw& draw, int k) {
    const std::uint8_t before = state_[draw.node];
    std::uint8_t after = before;
    if (draw.failure) {
      after = draw.failure_bit;
    } else {
      int votes = before;
      for (int i = 0; i < 2 * k; ++i) votes += state_[draw.samples[std::size_t(i)]];
      after = votes > k ? 1 : 0;
    }
    if (after != before) set(draw.node, after);
  }

 private:
  void set(Vertex v, std::uint8_t bit) {
    if (state_[v] == bit) return;
    state_.set(v, bit);
    for (Vertex u : g_.neighbors(v)) ones_nb_[u] += bit ? 1 : -1;
  }

  const Graph& g_;
  OpinionState state_;
  double alpha_;
  std::vector<int> ones_nb_;
};

}  // namespace

OpinionState OpinionState::zeros(std::size_t n) {
  return from_bits(std::vector<std::uint8_t>(n, 0));
}

OpinionState OpinionState::ones(std::size_t n) {
  return from_bits(std::vector<std::uint8_t>(n, 1));
}

OpinionState OpinionState::with_fraction(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) invalid("fraction must lie in [0, 1]");
  std::vector<std::uint8_t> bits(n, 0);
  const auto ones = static_cast<std::size_t>(std::llround(p * double(n)));
  std::fill(bits.begin(), bits.begin() + std::ptrdiff_t(ones), 1);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(bits[i - 1], bits[uniform_below(rng, i)]);
  return from_bits(std::move(bits));
}

OpinionState OpinionState::from_bits(std::vector<std::uint8_t> bits) {
  OpinionState s;
  for (auto& b : bits) {
    if (b > 1) invalid("opinions must be 0 or 1");
  }
  s.bits_ = std::move(bits);
  s.ones_ = s.recount();
  return s;
}

std::size_t OpinionState::recount() const noexcept {
  return std::size_t(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

OpinionState OpinionState::complement() const {
  OpinionState s = *this;
  for (auto& b : s.bits_) b ^= 1;
  s.ones_ = size() - ones_;
  return s;
}

void SimConfig::validate(std::size_t n) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) invalid("alpha must lie in [0, 1]");
  if (k < 1 || k > kMaxK) invalid("k must lie in [1, 30]");
  if (!(t_max > 0.0)) invalid("t_max must be positive");
  for (std::size_t level : stop_levels) {
    if (level > n) invalid("stop level " + std::to_string(level) + " exceeds n");
  }
}

void draw_update(const Graph& g, double alpha, int k, Rng& rng, UpdateDraw& draw) {
  draw.node = static_cast<Vertex>(uniform_below(rng, g.size()));
  draw.failure = alpha > 0.0 && uniform01(rng) < alpha;
  if (draw.failure) {
    draw.failure_bit = static_cast<std::uint8_t>(rng() >> 63);
    return;
  }
  const auto nb = g.neighbors(draw.node);
  for (int i = 0; i < 2 * k; ++i) {
    draw.samples[std::size_t(i)] = nb[uniform_below(rng, nb.size())];
  }
}

bool apply_update(const Graph& g, OpinionState& state, const UpdateDraw& draw, int k) {
  (void)g;
  const std::uint8_t before = state[draw.node];
  std::uint8_t after;
  if (draw.failure) {
    after = draw.failure_bit;
  } else {
    int votes = before;
    for (int i = 0; i < 2 * k; ++i) votes += state[draw.samples[std::size_t(i)]];
    after = votes > k ? 1 : 0;
  }
  if (after == before) return false;
  state.set(draw.node, after);
  return true;
}

RunRecord run(const Graph& g, const OpinionState& initial, const SimConfig& cfg) {
  const std::size_t n = g.size();
  check_state(g, initial);
  cfg.validate(n);

  std::vector<char> is_stop(n + 1, 0);
  for (std::size_t level : cfg.stop_levels) is_stop[level] = 1;

  RunRecord rec;
  rec.seed = cfg.seed;
  OpinionState state = initial;
  Rng rng(cfg.seed);
  UpdateDraw draw;
  const double rate = double(n);
  double t = 0.0;

  if (cfg.record_stride > 0) rec.trajectory.emplace_back(0.0, state.count_ones());
  if (is_stop[state.count_ones()]) {
    rec.hit_time = 0.0;
  } else {
    for (;;) {
      t += exponential(rng, rate);
      if (t > cfg.t_max) {
        rec.censored = true;
        t = cfg.t_max;
        break;
      }
      draw_update(g, cfg.alpha, cfg.k, rng, draw);
      apply_update(g, state, draw, cfg.k);
      ++rec.events;
      if (cfg.record_stride > 0 && rec.events % cfg.record_stride == 0) {
        rec.trajectory.emplace_back(t, state.count_ones());
      }
      if (cfg.verify_every > 0 && rec.events % cfg.verify_every == 0 && !state.verify()) {
        throw Error(ErrorCode::kNumerical, "opinion count cache diverged from recount");
      }
      if (is_stop[state.count_ones()]) {
        rec.hit_time = t;
        break;
      }
    }
  }
  rec.end_time = t;
  rec.final_ones = state.count_ones();
  return rec;
}

BatchSummary summarize(const std::vector<RunRecord>& runs, double t_max) {
  BatchSummary s;
  s.replicates = runs.size();
  double sum = 0.0;
  double sum_sq = 0.0;
  double lower = 0.0;
  for (const auto& r : runs) {
    if (r.hit_time) {
      ++s.hits;
      sum += *r.hit_time;
      sum_sq += *r.hit_time * *r.hit_time;
      lower += *r.hit_time;
    } else {
      ++s.censored_count;
      lower += t_max;
    }
  }
  if (s.hits > 0) {
    s.mean = sum / double(s.hits);
    if (s.hits > 1) {
      const double var = std::max(0.0, (sum_sq - double(s.hits) * s.mean * s.mean) /
                                           double(s.hits - 1));
      s.std_error = std::sqrt(var / double(s.hits));
    }
  }
  if (!runs.empty()) s.censored_lower_mean = lower / double(runs.size());
  return s;
}

BatchResult run_batch(const Graph& g, const OpinionState& initial, const SimConfig& cfg,
                      std::size_t replicates, unsigned threads) {
  if (replicates < 1) invalid("replicates must be >= 1");
  check_state(g, initial);
  cfg.validate(g.size());
  BatchResult out;
  out.runs.resize(replicates);
  parallel_for(
      replicates,
      [&](std::size_t i) {
        SimConfig local = cfg;
        local.seed = derive_seed(cfg.seed, i);
        out.runs[i] = run(g, initial, local);
      },
      threads);
  out.summary = summarize(out.runs, cfg.t_max);
  return out;
}

CoupledClocks sample_coupled_clocks(double q_plus_x, double q_bar_plus, double q_minus_x,
                                    double q_under_minus, Rng& rng) {
  auto slack = [](double a, double b) { return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); };
  if (q_plus_x > q_bar_plus + slack(q_plus_x, q_bar_plus)) {
    throw Error(ErrorCode::kSandwichViolation,
                "birth rate " + std::to_string(q_plus_x) + " of X exceeds bound " +
                    std::to_string(q_bar_plus));
  }
  if (q_minus_x + slack(q_minus_x, q_under_minus) < q_under_minus) {
    throw Error(ErrorCode::kSandwichViolation,
                "death rate " + std::to_string(q_minus_x) + " of X is below bound " +
                    std::to_string(q_under_minus));
  }
  CoupledClocks c;
  c.z1 = clock(rng, q_plus_x);
  c.z2 = clock(rng, std::max(0.0, q_bar_plus - q_plus_x));
  c.zbar1 = clock(rng, q_under_minus);
  c.zbar2 = clock(rng, std::max(0.0, q_minus_x - q_under_minus));
  return c;
}

CouplingReport run_coupled(const Graph& g, const OpinionState& initial, double alpha,
                           double L_min, double L_max, std::uint64_t seed, double t_max,
                           std::size_t record_stride) {
  check_state(g, initial);
  if (!(t_max > 0.0)) invalid("t_max must be positive");
  const std::size_t n = g.size();
  const BirthDeathSpec bound = sandwich_rates(n, alpha, L_min, L_max, SandwichSide::kUpper);

  RatedState x(g, initial, alpha);
  std::size_t abar = x.ones();
  Rng rng(seed);
  UpdateDraw draw;
  CouplingReport rep;
  double t = 0.0;
  auto gap = [&] { return long(abar) - long(x.ones()); };
  if (record_stride > 0) rep.gap_trajectory.emplace_back(0.0, 0L);

  for (;;) {
    if (abar != x.ones()) {
      // Independent evolution: X on its rate-n clock, Abar on its own rates.
      const double up = bound.q_plus[abar];
      const double down = bound.q_minus[abar];
      const double total = double(n) + up + down;
      t += exponential(rng, total);
      if (t > t_max) break;
      const double u = uniform01(rng) * total;
      if (u < double(n)) {
        draw_update(g, alpha, 1, rng, draw);
        x.apply(draw, 1);
      } else if (u < double(n) + up) {
        ++abar;
      } else {
        --abar;
      }
    } else {
      ++rep.equal_state_steps;
      const auto [qx_plus, qx_minus] = x.totals();
      const CoupledClocks c =
          sample_coupled_clocks(qx_plus, bound.q_plus[abar], qx_minus, bound.q_minus[abar], rng);
      const double first = std::min({c.z1, c.z2, c.zbar1, c.zbar2});
      if (!std::isfinite(first)) break;  // both chains frozen
      t += first;
      if (t > t_max) break;
      if (first == c.z1) {
        x.flip_weighted(0, qx_plus, rng);
        ++abar;
      } else if (first == c.z2) {
        ++abar;
      } else if (first == c.zbar1) {
        x.flip_weighted(1, qx_minus, rng);
        --abar;
      } else {
        x.flip_weighted(1, qx_minus, rng);
      }
    }
    ++rep.events;
    if (abar < x.ones()) ++rep.violations;
    rep.max_gap = std::max(rep.max_gap, gap());
    if (record_stride > 0 && rep.events % record_stride == 0) {
      rep.gap_trajectory.emplace_back(t, gap());
    }
  }
  rep.end_time = std::min(t, t_max);
  return rep;
}

}  // namespace twochoices
