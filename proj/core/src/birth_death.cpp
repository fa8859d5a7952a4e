#include "twochoices/birth_death.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twochoices/drift.hpp"
#include "twochoices/error.hpp"

namespace twochoices {
namespace {

// Largest Lambda*tau handled in one Poisson sum; e^-32 is still far above
// the double underflow limit.
constexpr double kChunk = 32.0;
constexpr double kPoissonTail = 1e-15;

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

void require_alpha_closed(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) invalid("alpha must lie in [0, 1]");
}

std::vector<std::size_t> sorted_targets(std::span<const std::size_t> targets, std::size_t n) {
  if (targets.empty()) invalid("target set is empty");
  std::vector<std::size_t> out(targets.begin(), targets.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.back() > n) invalid("target state out of range");
  return out;
}

// v <- v * U with U = I + Q / Lambda, the uniformized jump kernel.
void kernel_step(const BirthDeathSpec& spec, double lambda, const std::vector<double>& v,
                 std::vector<double>& out) {
  const std::size_t n = spec.n();
  for (std::size_t a = 0; a <= n; ++a) {
    double acc = v[a] * (1.0 - (spec.q_plus[a] + spec.q_minus[a]) / lambda);
    if (a > 0) acc += v[a - 1] * spec.q_plus[a - 1] / lambda;
    if (a < n) acc += v[a + 1] * spec.q_minus[a + 1] / lambda;
    out[a] = acc;
  }
}

// v * exp(Q tau) for lambda * tau <= kChunk.
void uniformized_chunk(const BirthDeathSpec& spec, double lambda, double tau,
                       std::vector<double>& v) {
  const double x = lambda * tau;
  double weight = std::exp(-x);
  double mass = weight;
  std::vector<double> term = v;
  std::vector<double> next(v.size());
  std::vector<double> acc(v.size());
  for (std::size_t a = 0; a < v.size(); ++a) acc[a] = weight * term[a];
  for (int k = 1; 1.0 - mass > kPoissonTail && k < 10000; ++k) {
    kernel_step(spec, lambda, term, next);
    term.swap(next);
    weight *= x / k;
    mass += weight;
    for (std::size_t a = 0; a < v.size(); ++a) acc[a] += weight * term[a];
  }
  // Condition on the retained Poisson terms so mass is conserved exactly.
  for (std::size_t a = 0; a < v.size(); ++a) v[a] = acc[a] / mass;
}

Eigen::MatrixXd matrix_exponential(const BirthDeathSpec& spec, double t) {
  const std::size_t n = spec.n();
  const auto size = static_cast<Eigen::Index>(n + 1);
  const double lambda = spec.max_total_rate();
  if (lambda == 0.0 || t == 0.0) return Eigen::MatrixXd::Identity(size, size);

  // Scale so that lambda * tau <= 1, then square back up.
  int squarings = 0;
  double tau = t;
  while (lambda * tau > 1.0) {
    tau *= 0.5;
    ++squarings;
  }
  const double x = lambda * tau;

  // Columns of the tri-diagonal kernel U; right-multiplying by U mixes at
  // most three columns.
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(size, size);
  Eigen::MatrixXd next(size, size);
  double weight = std::exp(-x);
  double mass = weight;
  Eigen::MatrixXd acc = weight * term;
  for (int k = 1; 1.0 - mass > kPoissonTail && k < 200; ++k) {
    for (Eigen::Index a = 0; a < size; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      next.col(a) = term.col(a) * (1.0 - (spec.q_plus[ua] + spec.q_minus[ua]) / lambda);
      if (a > 0) next.col(a) += term.col(a - 1) * (spec.q_plus[ua - 1] / lambda);
      if (a + 1 < size) next.col(a) += term.col(a + 1) * (spec.q_minus[ua + 1] / lambda);
    }
    term.swap(next);
    weight *= x / k;
    mass += weight;
    acc += weight * term;
  }
  acc /= mass;

  for (int s = 0; s < squarings; ++s) {
    next.noalias() = acc * acc;
    acc.swap(next);
    for (Eigen::Index a = 0; a < size; ++a) acc.row(a) /= acc.row(a).sum();
  }
  return acc;
}

}  // namespace

void BirthDeathSpec::validate() const {
  if (q_plus.size() < 2 || q_plus.size() != q_minus.size()) {
    invalid("birth-death spec needs matching rate arrays of length n+1 >= 2");
  }
  for (std::size_t a = 0; a < q_plus.size(); ++a) {
    if (!(std::isfinite(q_plus[a]) && q_plus[a] >= 0.0 && std::isfinite(q_minus[a]) &&
          q_minus[a] >= 0.0)) {
      invalid("rates must be finite and nonnegative (state " + std::to_string(a) + ")");
    }
  }
  if (q_plus.back() != 0.0) invalid("q_plus[n] must be 0");
  if (q_minus.front() != 0.0) invalid("q_minus[0] must be 0");
}

double BirthDeathSpec::max_total_rate() const noexcept {
  double m = 0.0;
  for (std::size_t a = 0; a < q_plus.size(); ++a) m = std::max(m, q_plus[a] + q_minus[a]);
  return m;
}

BirthDeathSpec complete_rates(std::size_t n, double alpha) {
  if (n < 2) invalid("complete_rates needs n >= 2");
  require_alpha_closed(alpha);
  BirthDeathSpec spec{std::vector<double>(n + 1), std::vector<double>(n + 1)};
  const double nm1 = double(n - 1);
  for (std::size_t a = 0; a <= n; ++a) {
    const double up = double(a) / nm1;
    const double down = double(n - a) / nm1;
    spec.q_plus[a] = double(n - a) * (alpha / 2.0 + (1.0 - alpha) * up * up);
    spec.q_minus[a] = double(a) * (alpha / 2.0 + (1.0 - alpha) * down * down);
  }
  return spec;
}

BirthDeathSpec complete_rates_2k(std::size_t n, int k, double alpha) {
  if (n < 2) invalid("complete_rates_2k needs n >= 2");
  if (k < 1 || k > kMax2k) invalid("complete_rates_2k needs 1 <= k <= 30");
  require_alpha_closed(alpha);
  const int m = 2 * k;
  const double nm1 = double(n - 1);
  // Probability that at least k+1 of 2k samples (with replacement) hold the
  // opposite opinion, when a fraction p of the neighbors hold it.
  auto majority = [&](double p) {
    double s = 0.0;
    for (int r = k + 1; r <= m; ++r) {
      s += double(binomial(unsigned(m), unsigned(r))) * std::pow(p, r) * std::pow(1.0 - p, m - r);
    }
    return s;
  };
  BirthDeathSpec spec{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  for (std::size_t a = 0; a <= n; ++a) {
    if (a < n) {
      spec.q_plus[a] = double(n - a) * (alpha / 2.0 + (1.0 - alpha) * majority(double(a) / nm1));
    }
    if (a > 0) {
      spec.q_minus[a] =
          double(a) * (alpha / 2.0 + (1.0 - alpha) * majority(double(n - a) / nm1));
    }
  }
  return spec;
}

BirthDeathSpec sandwich_rates(std::size_t n, double alpha, double L_min, double L_max,
                              SandwichSide side) {
  if (n < 2) invalid("sandwich_rates needs n >= 2");
  require_alpha_closed(alpha);
  if (!(L_min > 0.0)) throw Error(ErrorCode::kDegenerate, "sandwich_rates needs L_min > 0");
  if (L_max < L_min) invalid("sandwich_rates needs L_min <= L_max");

  const double up_l = side == SandwichSide::kUpper ? L_max : L_min;
  const double down_l = side == SandwichSide::kUpper ? L_min : L_max;
  const double nn = double(n) * double(n);
  BirthDeathSpec spec{std::vector<double>(n + 1), std::vector<double>(n + 1)};
  for (std::size_t a = 0; a <= n; ++a) {
    const double ad = double(a);
    const double bd = double(n - a);
    spec.q_plus[a] = 0.5 * alpha * bd + (1.0 - alpha) * up_l * ad * ad * bd / nn;
    spec.q_minus[a] = 0.5 * alpha * ad + (1.0 - alpha) * down_l * ad * bd * bd / nn;
  }
  return spec;
}

Distribution stationary(const BirthDeathSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n();
  std::vector<double> log_p(n + 1, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    if (!(spec.q_plus[a] > 0.0) || !(spec.q_minus[a + 1] > 0.0)) {
      throw Error(ErrorCode::kReducible,
                  "chain is reducible: zero rate between states " + std::to_string(a) +
                      " and " + std::to_string(a + 1));
    }
    log_p[a + 1] = log_p[a] + std::log(spec.q_plus[a]) - std::log(spec.q_minus[a + 1]);
  }
  const double top = *std::max_element(log_p.begin(), log_p.end());
  Distribution pi(n + 1);
  double total = 0.0;
  for (std::size_t a = 0; a <= n; ++a) total += (pi[a] = std::exp(log_p[a] - top));
  for (auto& p : pi) p /= total;
  return pi;
}

Distribution transient(const BirthDeathSpec& spec, std::size_t a0, double t) {
  spec.validate();
  const std::size_t n = spec.n();
  if (a0 > n) invalid("initial state out of range");
  if (!(t >= 0.0) || !std::isfinite(t)) invalid("time must be finite and >= 0");

  Distribution v(n + 1, 0.0);
  v[a0] = 1.0;
  const double lambda = spec.max_total_rate();
  if (lambda == 0.0 || t == 0.0) return v;

  const double x = lambda * t;
  const double states = double(n + 1);
  const double vector_cost = (x + kChunk) * 3.0 * states;
  const double matrix_cost = (std::log2(x) + 2.0) * states * states * states;
  if (vector_cost <= matrix_cost) {
    double remaining = t;
    while (remaining > 0.0) {
      const double tau = std::min(remaining, kChunk / lambda);
      uniformized_chunk(spec, lambda, tau, v);
      remaining -= tau;
    }
    return v;
  }
  const Eigen::MatrixXd p = matrix_exponential(spec, t);
  for (std::size_t a = 0; a <= n; ++a) v[a] = p(Eigen::Index(a0), Eigen::Index(a));
  return v;
}

std::vector<double> transition_matrix(const BirthDeathSpec& spec, double t) {
  spec.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) invalid("time must be finite and >= 0");
  const Eigen::MatrixXd p = matrix_exponential(spec, t);
  std::vector<double> out(static_cast<std::size_t>(p.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), p.rows(), p.cols()) = p;
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    invalid("tv_distance: length mismatch (" + std::to_string(p.size()) + " vs " +
            std::to_string(q.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double worst_case_distance(const BirthDeathSpec& spec, std::span<const double> pi, double t) {
  const std::size_t size = spec.n() + 1;
  if (pi.size() != size) invalid("stationary law has the wrong length");
  const std::vector<double> p = transition_matrix(spec, t);
  double worst = 0.0;
  for (std::size_t a = 0; a < size; ++a) {
    worst = std::max(worst, tv_distance(std::span(p).subspan(a * size, size), pi));
  }
  return worst;
}

MixingTime mixing_time(const BirthDeathSpec& spec, double epsilon, double t_cap) {
  if (!(epsilon > 0.0)) invalid("epsilon must be positive");
  const Distribution pi = stationary(spec);
  auto d = [&](double t) { return worst_case_distance(spec, pi, t); };
  if (d(0.0) <= epsilon) return {0.0, false};

  double lo = 0.0;
  double hi = 1.0 / spec.max_total_rate();
  while (d(hi) > epsilon) {
    lo = hi;
    hi *= 2.0;
    if (hi > t_cap) return {t_cap, true};
  }
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (d(mid) > epsilon ? lo : hi) = mid;
  }
  return {hi, false};
}

std::vector<std::size_t> half_targets(std::size_t n) {
  if (n % 2 == 0) return {n / 2};
  return {n / 2, n / 2 + 1};
}

double expected_hitting_time(const BirthDeathSpec& spec, std::size_t a0,
                             std::span<const std::size_t> targets) {
  spec.validate();
  const std::size_t n = spec.n();
  if (a0 > n) invalid("initial state out of range");
  const auto tg = sorted_targets(targets, n);
  if (std::binary_search(tg.begin(), tg.end(), a0)) return 0.0;

  auto is_target = [&](std::size_t a) { return std::binary_search(tg.begin(), tg.end(), a); };
  // Reachable stretch around a0, stopping at targets or zero rates.
  std::size_t lo = a0;
  while (lo > 0 && spec.q_minus[lo] > 0.0 && !is_target(lo - 1)) --lo;
  std::size_t hi = a0;
  while (hi < n && spec.q_plus[hi] > 0.0 && !is_target(hi + 1)) ++hi;
  const bool exit_low = lo > 0 && spec.q_minus[lo] > 0.0;   // lo - 1 is a target
  const bool exit_high = hi < n && spec.q_plus[hi] > 0.0;  // hi + 1 is a target

  // Every reachable state must be able to reach an exit.
  for (std::size_t a = lo; a <= hi; ++a) {
    bool up_ok = exit_high;
    for (std::size_t b = a; up_ok && b <= hi; ++b) up_ok = spec.q_plus[b] > 0.0;
    bool down_ok = exit_low;
    for (std::size_t b = a; down_ok && b >= lo; --b) {
      down_ok = spec.q_minus[b] > 0.0;
      if (b == 0) break;
    }
    if (!up_ok && !down_ok) {
      throw Error(ErrorCode::kDivergence,
                  "target set unreachable from state " + std::to_string(a));
    }
  }

  // (q+ + q-) h[a] - q+ h[a+1] - q- h[a-1] = 1 on [lo, hi], h = 0 on targets.
  const std::size_t m = hi - lo + 1;
  std::vector<double> diag(m);
  std::vector<double> upper(m);
  std::vector<double> rhs(m, 1.0);
  std::vector<double> lower(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = lo + i;
    // States outside [lo, hi] are targets (h = 0) or unreachable through a
    // zero rate; either way the off-band coefficient vanishes.
    diag[i] = spec.q_plus[a] + spec.q_minus[a];
    upper[i] = -spec.q_plus[a];
    lower[i] = -spec.q_minus[a];
  }
  // Thomas elimination.
  for (std::size_t i = 1; i < m; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> h(m);
  h[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) h[i] = (rhs[i] - upper[i] * h[i + 1]) / diag[i];
  const double result = h[a0 - lo];
  if (!std::isfinite(result) || result < 0.0) {
    throw Error(ErrorCode::kDivergence, "hitting-time solve broke down");
  }
  return result;
}

BirthDeathSpec with_absorbing(const BirthDeathSpec& spec, std::span<const std::size_t> targets) {
  spec.validate();
  BirthDeathSpec out = spec;
  for (std::size_t a : sorted_targets(targets, spec.n())) {
    out.q_plus[a] = 0.0;
    out.q_minus[a] = 0.0;
  }
  return out;
}

double hit_probability_by(const BirthDeathSpec& spec, std::size_t a0,
                          std::span<const std::size_t> targets, double t) {
  const auto absorbing = with_absorbing(spec, targets);
  const Distribution law = transient(absorbing, a0, t);
  double p = 0.0;
  for (std::size_t a : sorted_targets(targets, spec.n())) p += law[a];
  return std::min(1.0, p);
}

double exit_probability(const BirthDeathSpec& spec, std::size_t a0, std::size_t low,
                        std::size_t high) {
  spec.validate();
  if (low >= high) invalid("exit_probability needs low < high");
  if (high > spec.n()) invalid("exit_probability: high out of range");
  if (a0 < low || a0 > high) invalid("exit_probability needs low <= a0 <= high");
  if (a0 == low) return 0.0;
  if (a0 == high) return 1.0;

  // log w(t) = sum_{j=low+1}^{t-1} log(q-(j)/q+(j)) for t in (low, high]; the
  // common factor prod_{j<=low} cancels in the ratio.
  std::vector<double> log_w;
  log_w.reserve(high - low);
  log_w.push_back(0.0);
  for (std::size_t j = low + 1; j < high; ++j) {
    if (!(spec.q_plus[j] > 0.0) || !(spec.q_minus[j] > 0.0)) {
      throw Error(ErrorCode::kReducible,
                  "exit_probability needs positive interior rates (state " + std::to_string(j) + ")");
    }
    log_w.push_back(log_w.back() + std::log(spec.q_minus[j]) - std::log(spec.q_plus[j]));
  }
  const double top = *std::max_element(log_w.begin(), log_w.end());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const double w = std::exp(log_w[i] - top);
    den += w;
    if (low + 1 + i <= a0) num += w;
  }
  return num / den;
}

}  // namespace twochoices
