#include "twochoices/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include "twochoices/error.hpp"

namespace twochoices {
namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

std::uint32_t count_ones(std::uint32_t x) { return std::uint32_t(std::popcount(x)); }

// x * exp(Q tau) for Lambda * tau <= 32.
void full_chunk(const FullChain& c, double lambda, double tau, std::vector<double>& v) {
  const std::size_t states = c.states();
  const double x = lambda * tau;
  double weight = std::exp(-x);
  double mass = weight;
  std::vector<double> term = v;
  std::vector<double> next(states);
  std::vector<double> acc(states);
  for (std::size_t s = 0; s < states; ++s) acc[s] = weight * term[s];
  for (int k = 1; 1.0 - mass > 1e-15 && k < 10000; ++k) {
    for (std::size_t s = 0; s < states; ++s) next[s] = term[s] * (1.0 - c.exit_rate(std::uint32_t(s)) / lambda);
    for (std::size_t s = 0; s < states; ++s) {
      if (term[s] == 0.0) continue;
      for (std::size_t v = 0; v < c.n; ++v) {
        next[s ^ (std::size_t{1} << v)] += term[s] * c.rate(std::uint32_t(s), v) / lambda;
      }
    }
    term.swap(next);
    weight *= x / k;
    mass += weight;
    for (std::size_t s = 0; s < states; ++s) acc[s] += weight * term[s];
  }
  for (std::size_t s = 0; s < states; ++s) v[s] = acc[s] / mass;
}

double max_exit_rate(const FullChain& c) {
  double m = 0.0;
  for (std::size_t s = 0; s < c.states(); ++s) m = std::max(m, c.exit_rate(std::uint32_t(s)));
  return m;
}

}  // namespace

double FullChain::exit_rate(std::uint32_t x) const noexcept {
  double s = 0.0;
  for (std::size_t v = 0; v < n; ++v) s += rate(x, v);
  return s;
}

FullChain build_full_chain(const Graph& g, double alpha) {
  const std::size_t n = g.size();
  if (n > kOracleMaxN) {
    throw Error(ErrorCode::kSizeCap, "full chain limited to n <= 12, got " + std::to_string(n));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) invalid("alpha must lie in [0, 1]");
  FullChain c;
  c.n = n;
  c.alpha = alpha;
  c.flip_rate.assign(c.states() * n, 0.0);
  for (std::uint32_t x = 0; x < c.states(); ++x) {
    for (Vertex v = 0; v < n; ++v) {
      const std::uint32_t own = (x >> v) & 1U;
      std::uint32_t other = 0;  // neighbors holding the opposite opinion
      for (Vertex u : g.neighbors(v)) other += ((x >> u) & 1U) != own;
      const double frac = double(other) / double(g.degree(v));
      c.flip_rate[x * n + v] = alpha / 2.0 + (1.0 - alpha) * frac * frac;
    }
  }
  return c;
}

std::vector<double> full_stationary(const FullChain& chain) {
  if (chain.alpha == 0.0) {
    throw Error(ErrorCode::kReducible, "alpha = 0 has two absorbing consensus states");
  }
  const std::size_t m = chain.states();
  // Dense off-diagonal rate matrix, row-major.
  std::vector<double> p(m * m, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t v = 0; v < chain.n; ++v) {
      p[s * m + (s ^ (std::size_t{1} << v))] = chain.rate(std::uint32_t(s), v);
    }
  }
  // Grassmann-Taksar-Heyman elimination: subtraction-free, so the result is
  // accurate to a few ulps per entry.
  for (std::size_t k = m - 1; k > 0; --k) {
    double out = 0.0;
    for (std::size_t j = 0; j < k; ++j) out += p[k * m + j];
    if (!(out > 0.0)) throw Error(ErrorCode::kReducible, "full chain is reducible");
    for (std::size_t i = 0; i < k; ++i) p[i * m + k] /= out;
    for (std::size_t i = 0; i < k; ++i) {
      const double pik = p[i * m + k];
      if (pik == 0.0) continue;
      double* row = &p[i * m];
      const double* krow = &p[k * m];
      for (std::size_t j = 0; j < k; ++j) row[j] += pik * krow[j];
    }
  }
  std::vector<double> pi(m, 0.0);
  pi[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 1; k < m; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += pi[i] * p[i * m + k];
    pi[k] = s;
    total += s;
  }
  for (auto& x : pi) x /= total;
  return pi;
}

std::vector<double> full_transient(const FullChain& chain, std::uint32_t x0, double t) {
  if (x0 >= chain.states()) invalid("initial state out of range");
  if (!(t >= 0.0) || !std::isfinite(t)) invalid("time must be finite and >= 0");
  std::vector<double> v(chain.states(), 0.0);
  v[x0] = 1.0;
  const double lambda = max_exit_rate(chain);
  if (lambda == 0.0 || t == 0.0) return v;
  double remaining = t;
  while (remaining > 0.0) {
    const double tau = std::min(remaining, 32.0 / lambda);
    full_chunk(chain, lambda, tau, v);
    remaining -= tau;
  }
  return v;
}

double full_worst_case_distance(const FullChain& chain, const std::vector<double>& pi, double t) {
  if (pi.size() != chain.states()) invalid("stationary law has the wrong length");
  double worst = 0.0;
  for (std::uint32_t x = 0; x < chain.states(); ++x) {
    worst = std::max(worst, tv_distance(full_transient(chain, x, t), pi));
  }
  return worst;
}

MixingTime full_mixing_time(const FullChain& chain, double epsilon, double t_cap) {
  if (!(epsilon > 0.0)) invalid("epsilon must be positive");
  const auto pi = full_stationary(chain);
  auto d = [&](double t) { return full_worst_case_distance(chain, pi, t); };
  if (d(0.0) <= epsilon) return {0.0, false};
  double lo = 0.0;
  double hi = 1.0 / max_exit_rate(chain);
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

Distribution count_marginal(std::size_t n, const std::vector<double>& law) {
  if (law.size() != (std::size_t{1} << n)) invalid("law length must be 2^n");
  Distribution out(n + 1, 0.0);
  for (std::size_t s = 0; s < law.size(); ++s) out[count_ones(std::uint32_t(s))] += law[s];
  return out;
}

bool is_lumpable(const FullChain& chain, double tol) {
  std::vector<double> up(chain.n + 1, -1.0);
  std::vector<double> down(chain.n + 1, -1.0);
  for (std::uint32_t x = 0; x < chain.states(); ++x) {
    double u = 0.0;
    double d = 0.0;
    for (std::size_t v = 0; v < chain.n; ++v) ((x >> v) & 1U ? d : u) += chain.rate(x, v);
    const std::uint32_t a = count_ones(x);
    if (up[a] < 0.0) {
      up[a] = u;
      down[a] = d;
    } else if (std::abs(up[a] - u) > tol * std::max(1.0, u) ||
               std::abs(down[a] - d) > tol * std::max(1.0, d)) {
      return false;
    }
  }
  return true;
}

RateSandwichReport check_rate_sandwich(const FullChain& chain, double L_min, double L_max) {
  const auto upper = sandwich_rates(chain.n, chain.alpha, L_min, L_max, SandwichSide::kUpper);
  const auto lower = sandwich_rates(chain.n, chain.alpha, L_min, L_max, SandwichSide::kLower);
  RateSandwichReport rep;
  auto breach = [&](double value, double lo, double hi) {
    const double tol = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
    double excess = 0.0;
    if (value < lo - tol) excess = (lo - value) / std::max(lo, 1e-300);
    if (value > hi + tol) excess = (value - hi) / std::max(hi, 1e-300);
    return excess;
  };
  for (std::uint32_t x = 0; x < chain.states(); ++x) {
    double u = 0.0;
    double d = 0.0;
    for (std::size_t v = 0; v < chain.n; ++v) ((x >> v) & 1U ? d : u) += chain.rate(x, v);
    const std::uint32_t a = count_ones(x);
    // (q_plus_lower, q_plus_upper) = (lower.q_plus, upper.q_plus); the death
    // bounds swap sides.
    const double e = std::max(breach(u, lower.q_plus[a], upper.q_plus[a]),
                              breach(d, upper.q_minus[a], lower.q_minus[a]));
    ++rep.states_checked;
    if (e > 0.0) {
      ++rep.violations;
      rep.worst_excess = std::max(rep.worst_excess, e);
    }
  }
  return rep;
}

const std::vector<CatalogEntry>& graph_catalog() {
  static const std::vector<CatalogEntry> catalog = [] {
    std::vector<CatalogEntry> out;
    for (std::size_t n = 2; n <= 6; ++n) {
      std::vector<Edge> pairs;
      for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
      }
      auto index_of = [&](Vertex u, Vertex v) {
        if (u > v) std::swap(u, v);
        // Row-major position of (u, v) in the upper triangle.
        return std::size_t(u) * (2 * n - u - 1) / 2 + (v - u - 1);
      };
      // Edge-index images under every vertex permutation.
      std::vector<std::vector<std::size_t>> images;
      std::vector<Vertex> perm(n);
      std::iota(perm.begin(), perm.end(), Vertex{0});
      do {
        std::vector<std::size_t> img(pairs.size());
        for (std::size_t e = 0; e < pairs.size(); ++e) {
          img[e] = index_of(perm[pairs[e].first], perm[pairs[e].second]);
        }
        images.push_back(std::move(img));
      } while (std::next_permutation(perm.begin(), perm.end()));

      std::set<std::uint32_t> seen;
      const std::uint32_t masks = std::uint32_t{1} << pairs.size();
      for (std::uint32_t mask = 1; mask < masks; ++mask) {
        std::vector<Edge> edges;
        for (std::size_t e = 0; e < pairs.size(); ++e) {
          if (mask >> e & 1U) edges.push_back(pairs[e]);
        }
        if (!is_connected(n, edges)) continue;
        std::uint32_t canon = mask;
        for (const auto& img : images) {
          std::uint32_t m = 0;
          for (std::size_t e = 0; e < pairs.size(); ++e) {
            if (mask >> e & 1U) m |= std::uint32_t{1} << img[e];
          }
          canon = std::min(canon, m);
        }
        if (!seen.insert(canon).second) continue;
        out.push_back({"n" + std::to_string(n) + "_" + std::to_string(seen.size()),
                       Graph::from_edges(n, edges)});
      }
    }
    out.push_back({"K7", complete_graph(7)});
    out.push_back({"K8", complete_graph(8)});
    out.push_back({"C7", cycle_graph(7)});
    out.push_back({"Petersen", petersen_graph()});
    return out;
  }();
  return catalog;
}

}  // namespace twochoices
