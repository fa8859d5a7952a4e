#include "twochoices/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "twochoices/error.hpp"
#include "twochoices/rng.hpp"

namespace twochoices {
namespace {

double unit_residual(const Graph& g) {
  double worst = 0.0;
  for (Vertex v = 0; v < g.size(); ++v) {
    double row = 0.0;
    const double inv = 1.0 / g.degree(v);
    for (std::size_t i = 0; i < g.degree(v); ++i) row += inv;
    worst = std::max(worst, std::abs(row - 1.0));
  }
  return worst;
}

struct TopPair {
  double lambda1;
  double lambda;
};

TopPair dense_spectrum(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd inv_sqrt(n);
  for (Vertex v = 0; v < g.size(); ++v) inv_sqrt[v] = 1.0 / std::sqrt(double(g.degree(v)));
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(n, n);
  for (Vertex v = 0; v < g.size(); ++v) {
    for (Vertex u : g.neighbors(v)) sym(v, u) = inv_sqrt[v] * inv_sqrt[u];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumerical, "dense eigensolver did not converge");
  }
  const auto& ev = solver.eigenvalues();  // ascending
  return {ev[n - 1], std::max(std::abs(ev[0]), std::abs(ev[n - 2]))};
}

// Power iteration on B^2 where B is the symmetric operator with the top
// eigenpair (1, sqrt(d)/sqrt(vol)) deflated. Squaring makes +lambda and
// -lambda the same dominant eigenvalue, so oscillation cannot stall it.
TopPair iterative_spectrum(const Graph& g, const SpectralOptions& opt) {
  const std::size_t n = g.size();
  std::vector<double> inv_sqrt(n);
  std::vector<double> top(n);
  const double vol = static_cast<double>(g.volume());
  for (Vertex v = 0; v < n; ++v) {
    inv_sqrt[v] = 1.0 / std::sqrt(double(g.degree(v)));
    top[v] = std::sqrt(double(g.degree(v)) / vol);
  }
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (Vertex v = 0; v < n; ++v) {
      double acc = 0.0;
      for (Vertex u : g.neighbors(v)) acc += inv_sqrt[u] * x[u];
      y[v] = acc * inv_sqrt[v];
    }
  };
  auto deflate = [&](std::vector<double>& x) {
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += top[i] * x[i];
    for (std::size_t i = 0; i < n; ++i) x[i] -= proj * top[i];
  };
  auto norm = [](const std::vector<double>& x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
  };

  std::vector<double> tmp(n);
  apply(top, tmp);
  double lambda1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) lambda1 += top[i] * tmp[i];

  Rng rng(opt.seed);
  std::normal_distribution<double> gauss;
  std::vector<double> x(n);
  for (auto& xi : x) xi = gauss(rng);
  deflate(x);
  double nx = norm(x);
  for (auto& xi : x) xi /= nx;

  std::vector<double> bx(n);
  std::vector<double> b2x(n);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    apply(x, bx);
    deflate(bx);
    apply(bx, b2x);
    deflate(b2x);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += x[i] * b2x[i];
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (b2x[i] - mu * x[i]) * (b2x[i] - mu * x[i]);
    residual = std::sqrt(r2);
    // |mu - eigenvalue of B^2| <= residual for a symmetric operator.
    if (residual <= opt.tolerance * std::max(mu, opt.tolerance)) {
      return {lambda1, std::sqrt(std::max(mu, 0.0))};
    }
    double nb = norm(b2x);
    if (nb == 0.0) return {lambda1, 0.0};
    for (std::size_t i = 0; i < n; ++i) x[i] = b2x[i] / nb;
  }
  std::ostringstream msg;
  msg << "iterative eigensolver did not converge in " << opt.max_iterations
      << " iterations (residual " << residual << ")";
  throw Error(ErrorCode::kNumerical, msg.str());
}

double side_count(const Bipartition& p) {
  return static_cast<double>(std::count(p.begin(), p.end(), true));
}

void validate(const Graph& g, const Bipartition& p) {
  if (p.size() != g.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "bipartition size " + std::to_string(p.size()) +
                    " does not match graph size " + std::to_string(g.size()));
  }
  const auto s = static_cast<std::size_t>(side_count(p));
  if (s == 0 || s == p.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bipartition has an empty side");
  }
}

InequalityCheck make_check(double value, double lower, double upper) {
  InequalityCheck c{value, lower, upper, std::min(value - lower, upper - value), true};
  const double tol = 1e-9 * std::max({1.0, std::abs(lower), std::abs(upper)});
  c.holds = value >= lower - tol && value <= upper + tol;
  return c;
}

InequalityReport collect(std::vector<InequalityCheck> checks) {
  InequalityReport r;
  r.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) {
    if (!c.holds) ++r.violations;
    r.min_slack = std::min(r.min_slack, c.slack);
  }
  r.checks = std::move(checks);
  return r;
}

}  // namespace

SpectralSummary summary_from_lambda(double lambda, std::uint32_t d_min,
                                    std::uint32_t d_max) {
  if (d_min == 0 || d_max < d_min) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < d_min <= d_max");
  }
  SpectralSummary s;
  s.lambda = lambda;
  s.d_min = d_min;
  s.d_max = d_max;
  const double ratio = double(d_max) / double(d_min);
  s.L_max = (1.0 + lambda) * (1.0 + lambda) * ratio * ratio * ratio;
  s.L_min = (1.0 - lambda) * (1.0 - lambda) / (ratio * ratio * ratio);
  s.Sigma_L = s.L_max + s.L_min;
  s.Delta_L = s.L_max - s.L_min;
  s.K_L = 27.0 * s.Delta_L * s.Delta_L / (4.0 * s.Sigma_L * s.Sigma_L);
  s.bipartite = lambda >= 1.0 - 1e-8;
  return s;
}

SpectralSummary spectral_summary(const Graph& g, const SpectralOptions& options) {
  const TopPair top = g.size() <= options.dense_limit ? dense_spectrum(g)
                                                      : iterative_spectrum(g, options);
  if (std::abs(top.lambda1 - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "top eigenvalue " << top.lambda1 << " differs from 1";
    throw Error(ErrorCode::kNumerical, msg.str());
  }
  // Round-off can push a bipartite graph's -1 eigenvalue just past 1 in
  // magnitude.
  SpectralSummary s =
      summary_from_lambda(std::min(top.lambda, 1.0), g.min_degree(), g.max_degree());
  s.lambda1 = top.lambda1;
  s.residual = unit_residual(g);
  return s;
}

Bipartition bipartition_from_mask(std::size_t n, std::uint64_t mask) {
  if (n > 64) throw Error(ErrorCode::kInvalidArgument, "mask bipartitions need n <= 64");
  Bipartition p(n);
  for (std::size_t v = 0; v < n; ++v) p[v] = ((mask >> v) & 1U) != 0;
  return p;
}

Bipartition bipartition_from_set(std::size_t n, std::span<const Vertex> s) {
  Bipartition p(n, false);
  for (Vertex v : s) {
    if (v >= n) throw Error(ErrorCode::kInvalidArgument, "vertex out of range in S");
    if (p[v]) throw Error(ErrorCode::kInvalidArgument, "duplicate vertex in S");
    p[v] = true;
  }
  return p;
}

std::vector<Bipartition> all_bipartitions(std::size_t n) {
  if (n < 2 || n > 24) {
    throw Error(ErrorCode::kInvalidArgument, "all_bipartitions needs 2 <= n <= 24");
  }
  std::vector<Bipartition> out;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  out.reserve(full - 1);
  for (std::uint64_t mask = 1; mask < full; ++mask) out.push_back(bipartition_from_mask(n, mask));
  return out;
}

InequalityReport verify_expander_mixing(const Graph& g, const SpectralSummary& s,
                                        std::span<const Bipartition> partitions) {
  std::vector<InequalityCheck> checks;
  checks.reserve(partitions.size());
  const double vol = static_cast<double>(g.volume());
  for (const auto& p : partitions) {
    validate(g, p);
    double vol_s = 0.0;
    double cut = 0.0;
    for (Vertex v = 0; v < g.size(); ++v) {
      if (!p[v]) continue;
      vol_s += g.degree(v);
      for (Vertex u : g.neighbors(v)) cut += p[u] ? 0.0 : 1.0;
    }
    const double center = vol_s * (vol - vol_s) / vol;
    const double radius = s.lambda * center;
    checks.push_back(make_check(cut, center - radius, center + radius));
  }
  return collect(std::move(checks));
}

InequalityReport verify_expander_mixing(const Graph& g,
                                        std::span<const Bipartition> partitions) {
  return verify_expander_mixing(g, spectral_summary(g), partitions);
}

InequalityReport verify_sandwich(const Graph& g, const SpectralSummary& s,
                                 std::span<const Bipartition> partitions) {
  std::vector<InequalityCheck> checks;
  checks.reserve(partitions.size());
  const double n = static_cast<double>(g.size());
  for (const auto& p : partitions) {
    validate(g, p);
    const double size_s = side_count(p);
    const double size_t_ = n - size_s;
    double middle = 0.0;
    for (Vertex v = 0; v < g.size(); ++v) {
      if (p[v]) continue;
      double into_s = 0.0;
      for (Vertex u : g.neighbors(v)) into_s += p[u] ? 1.0 : 0.0;
      const double frac = into_s / g.degree(v);
      middle += frac * frac;
    }
    const double base = size_s * size_s * size_t_ / (n * n);
    checks.push_back(make_check(middle, s.L_min * base, s.L_max * base));
  }
  return collect(std::move(checks));
}

InequalityReport verify_sandwich(const Graph& g, std::span<const Bipartition> partitions) {
  return verify_sandwich(g, spectral_summary(g), partitions);
}

}  // namespace twochoices
