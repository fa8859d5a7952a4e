#include "twochoices/drift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "twochoices/error.hpp"

namespace twochoices {
namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

void require_k(int k) {
  if (k < 1 || k > kMax2k) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must lie in [1, " + std::to_string(kMax2k) + "]");
  }
}

double b_n(std::size_t n) {
  const double r = double(n) / double(n - 1);
  return r * r;
}

// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign; runs until the
// midpoint stops moving, i.e. to full double resolution.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Roots of f on [0, 1], given interior breakpoints between which f is
// monotone (the critical points of a polynomial drift).
std::vector<double> monotone_roots(const std::function<double(double)>& f,
                                   std::vector<double> breaks) {
  breaks.push_back(0.0);
  breaks.push_back(1.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                              [](double b) { return b < 0.0 || b > 1.0; }),
               breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<double> roots;
  auto push = [&](double r) {
    if (roots.empty() || std::abs(roots.back() - r) > 1e-12) roots.push_back(r);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i];
    const double hi = breaks[i + 1];
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) push(lo);
    if (flo != 0.0 && fhi != 0.0 && (flo < 0.0) != (fhi < 0.0)) push(bisect(f, lo, hi));
    if (fhi == 0.0) push(hi);
  }
  return roots;
}

// Stability from the sign change of the drift across the root.
Stability classify(const std::function<double(double)>& f, double r) {
  const double h = 1e-7;
  const double left = r - h >= 0.0 ? f(r - h) : -f(r + h);
  const double right = r + h <= 1.0 ? f(r + h) : -f(r - h);
  if (left > 0.0 && right < 0.0) return Stability::kAttracting;
  if (left < 0.0 && right > 0.0) return Stability::kRepelling;
  // Repeated root; the drift keeps the same sign on both sides. Treat a
  // root approached from the left with positive drift as attracting.
  return left >= 0.0 ? Stability::kAttracting : Stability::kRepelling;
}

DriftProfile make_profile(DriftKind kind, const std::function<double(double)>& f,
                          const std::vector<double>& roots) {
  DriftProfile p;
  p.kind = kind;
  for (double r : roots) p.roots.push_back({r, classify(f, r)});
  return p;
}

DriftProfile degenerate_profile(DriftKind kind, double contraction) {
  DriftProfile p;
  p.kind = kind;
  p.roots.push_back({0.5, Stability::kAttracting});
  p.contraction = contraction;
  p.degenerate = true;
  return p;
}

// Both critical points y = 1/2 +- sqrt(1/4 - s) of a drift whose derivative
// vanishes where y(1 - y) = s; none when s >= 1/4.
std::vector<double> symmetric_critical_points(double s) {
  if (s >= 0.25) return {};
  const double w = std::sqrt(0.25 - s);
  return {0.5 - w, 0.5 + w};
}

}  // namespace

// ---------------------------------------------------------------- complete

double f_complete(double y, std::size_t n, double alpha) {
  const double one_minus_2y = 1.0 - 2.0 * y;
  return one_minus_2y * alpha / 2.0 - (1.0 - alpha) * b_n(n) * y * (1.0 - y) * one_minus_2y;
}

double complete_threshold(std::size_t n) {
  const double m = 1.0 - 1.0 / double(n);
  return 1.0 / (1.0 + 2.0 * m * m);
}

double complete_contraction(std::size_t n, double alpha) {
  return (3.0 * alpha - 1.0) / 2.0 - (1.0 - alpha) * (b_n(n) - 1.0) / 2.0;
}

DriftProfile roots_complete(std::size_t n, double alpha) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "roots_complete needs n >= 2");
  require_alpha(alpha);
  const double c = complete_contraction(n, alpha);
  if (std::abs(alpha - complete_threshold(n)) <= kThresholdTolerance) {
    return degenerate_profile(DriftKind::kComplete, c);
  }
  auto f = [n, alpha](double y) { return f_complete(y, n, alpha); };
  // f'(y) = -[alpha + (1-alpha) b_n (6y^2 - 6y + 1)] vanishes where
  // y(1-y) = (1 + alpha/((1-alpha) b_n)) / 6.
  const double s = (1.0 + alpha / ((1.0 - alpha) * b_n(n))) / 6.0;
  DriftProfile p =
      make_profile(DriftKind::kComplete, f, monotone_roots(f, symmetric_critical_points(s)));
  p.contraction = c;
  return p;
}

// ----------------------------------------------------------------- general

double F_general(double y, double alpha, double Sigma_L, double Delta_L) {
  const double kappa = alpha / (Sigma_L * (1.0 - alpha));
  return (1.0 - 2.0 * y) * (y * y - y + kappa) + Delta_L / (4.0 * Sigma_L);
}

DriftProfile roots_general(double alpha, double Sigma_L, double Delta_L) {
  require_alpha(alpha);
  if (!(Sigma_L > 0.0) || Delta_L < 0.0 || Delta_L >= Sigma_L) {
    throw Error(ErrorCode::kInvalidArgument, "need Sigma_L > 0 and 0 <= Delta_L < Sigma_L");
  }
  auto f = [=](double y) { return F_general(y, alpha, Sigma_L, Delta_L); };
  // F'(y) = -6 (y^2 - y + (1 + 2 kappa)/6).
  const double kappa = alpha / (Sigma_L * (1.0 - alpha));
  DriftProfile p = make_profile(DriftKind::kLimitGeneral, f,
                                monotone_roots(f, symmetric_critical_points((1.0 + 2.0 * kappa) / 6.0)));
  p.contraction = alpha * (4.0 + Sigma_L) - Sigma_L;
  return p;
}

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::kMetastable: return "metastable";
    case Regime::kFast: return "fast";
    case Regime::kIndeterminate: return "indeterminate";
  }
  return "indeterminate";
}

GeneralThresholds thresholds_general(double L_min, double L_max, double alpha) {
  if (!(L_min > 0.0)) {
    throw Error(ErrorCode::kDegenerate,
                "L_min must be positive (bipartite or degenerate graph)");
  }
  if (L_max < L_min) throw Error(ErrorCode::kInvalidArgument, "need L_min <= L_max");
  require_alpha(alpha);

  const double sigma = L_max + L_min;
  const double delta = L_max - L_min;
  GeneralThresholds t;
  t.K_L = 27.0 * delta * delta / (4.0 * sigma * sigma);
  t.c_alpha_L = alpha * (4.0 + sigma) - sigma;
  if (t.K_L < 1.0) {
    const double a = sigma * (1.0 - std::cbrt(t.K_L));
    t.alpha_meta_threshold = a / (4.0 + a);
  } else {
    t.threshold_undefined = true;
  }

  if (t.alpha_meta_threshold && alpha < *t.alpha_meta_threshold) {
    t.regime = Regime::kMetastable;
    // Exactly two roots of F in (0, 1/2), separated by the local minimum.
    std::vector<double> inner;
    for (const auto& r : roots_general(alpha, sigma, delta).roots) {
      if (r.value > 0.0 && r.value < 0.5) inner.push_back(r.value);
    }
    if (inner.size() == 2) {
      t.r_smaller = inner[0];
      t.r_lower = inner[1];
    }
  } else if (t.c_alpha_L > 0.0) {
    t.regime = Regime::kFast;
    t.epsilon_L = (1.0 - alpha) * delta / t.c_alpha_L;
  }
  return t;
}

GeneralThresholds thresholds_general(const SpectralSummary& summary, double alpha) {
  if (summary.bipartite) {
    throw Error(ErrorCode::kDegenerate, "bipartite graph: L_min = 0, thresholds undefined");
  }
  return thresholds_general(summary.L_min, summary.L_max, alpha);
}

// ------------------------------------------------------------------ 2k

std::uint64_t binomial(unsigned n, unsigned r) {
  if (n > 60) throw Error(ErrorCode::kInvalidArgument, "binomial: n <= 60 supported");
  if (r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t out = 1;
  // out * (n - i) stays below 2^64 for n <= 60 because out = C(n, i) and the
  // division is exact at every step.
  for (unsigned i = 0; i < r; ++i) out = out * (n - i) / (i + 1);
  return out;
}

double f_2k(double y, int k, double alpha) {
  require_k(k);
  const int m = 2 * k;
  double sum = 0.0;
  for (int r = k + 1; r <= m; ++r) {
    const double c = static_cast<double>(binomial(unsigned(m), unsigned(r)));
    sum += c * (std::pow(y, r) * std::pow(1.0 - y, m - r + 1) -
                std::pow(1.0 - y, r) * std::pow(y, m - r + 1));
  }
  return alpha / 2.0 * (1.0 - 2.0 * y) + (1.0 - alpha) * sum;
}

double alpha_2k(int k) {
  require_k(k);
  // ((2k+1) C(2k,k) - 4^k) / ((2k+1) C(2k,k)) in exact integers (fits in 64
  // bits for k <= 30), so k = 1 rounds to 1/3 exactly.
  const std::uint64_t den = (2 * std::uint64_t(k) + 1) * binomial(unsigned(2 * k), unsigned(k));
  const std::uint64_t num = den - (std::uint64_t{1} << (2 * k));
  return static_cast<double>(num) / static_cast<double>(den);
}

DriftProfile roots_2k(int k, double alpha) {
  require_k(k);
  require_alpha(alpha);
  const double central = static_cast<double>(binomial(unsigned(2 * k), unsigned(k)));
  // f'(y) = -1 + (1-alpha)(2k+1) C(2k,k) y^k (1-y)^k.
  const double scale = (1.0 - alpha) * (2.0 * k + 1.0) * central;
  const double contraction = 1.0 - scale * std::pow(0.25, k);
  if (std::abs(alpha - alpha_2k(k)) <= kThresholdTolerance) {
    return degenerate_profile(DriftKind::kChoices2k, contraction);
  }
  auto f = [k, alpha](double y) { return f_2k(y, k, alpha); };
  DriftProfile p = make_profile(DriftKind::kChoices2k, f,
                                monotone_roots(f, symmetric_critical_points(std::pow(1.0 / scale, 1.0 / k))));
  p.contraction = contraction;
  return p;
}

}  // namespace twochoices
