#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "twochoices/spectral.hpp"

namespace twochoices {

enum class DriftKind { kComplete, kLimitGeneral, kChoices2k };

enum class Stability { kAttracting, kRepelling };

struct DriftRoot {
  double value = 0.0;
  Stability stability = Stability::kAttracting;
};

struct DriftProfile {
  DriftKind kind = DriftKind::kComplete;
  std::vector<DriftRoot> roots;  // ascending, all in [0, 1]
  // c(n, alpha) for complete graphs, c(alpha, L) for the general bound and
  // -f'(1/2) for 2k-choices; positive means global contraction toward 1/2.
  double contraction = 0.0;
  // Parameter sits (within 1e-9) on the phase boundary; roots collapse onto a
  // repeated root at 1/2.
  bool degenerate = false;
};

/// Tolerance used to flag a parameter as sitting on a phase boundary.
inline constexpr double kThresholdTolerance = 1e-9;

// Complete graph, finite n. f(y) = (1-2y) alpha/2 - (1-alpha) b_n y(1-y)(1-2y)
// with b_n = (n/(n-1))^2.
double f_complete(double y, std::size_t n, double alpha);
double complete_threshold(std::size_t n);  // 1 / (1 + 2 (1 - 1/n)^2)
double complete_contraction(std::size_t n, double alpha);
DriftProfile roots_complete(std::size_t n, double alpha);

// Drift bound for general graphs in terms of the sandwich constants.
double F_general(double y, double alpha, double Sigma_L, double Delta_L);
DriftProfile roots_general(double alpha, double Sigma_L, double Delta_L);

enum class Regime { kMetastable, kFast, kIndeterminate };
std::string_view to_string(Regime r) noexcept;

struct GeneralThresholds {
  double K_L = 0.0;
  // Sigma(1 - K^{1/3}) / (4 + Sigma(1 - K^{1/3})); empty when K_L >= 1.
  std::optional<double> alpha_meta_threshold;
  double c_alpha_L = 0.0;  // alpha (4 + Sigma) - Sigma
  std::optional<double> epsilon_L;  // (1 - alpha) Delta / c, when c > 0
  std::optional<double> r_lower;    // larger root of F in (0, 1/2), metastable only
  std::optional<double> r_smaller;  // smaller root of F in (0, 1/2), metastable only
  Regime regime = Regime::kIndeterminate;
  bool threshold_undefined = false;  // K_L >= 1
};

GeneralThresholds thresholds_general(double L_min, double L_max, double alpha);
GeneralThresholds thresholds_general(const SpectralSummary& summary, double alpha);

// 2k-choices (n -> infinity limit).
std::uint64_t binomial(unsigned n, unsigned r);  // exact, n <= 60
inline constexpr int kMax2k = 30;
double f_2k(double y, int k, double alpha);
double alpha_2k(int k);
DriftProfile roots_2k(int k, double alpha);

}  // namespace twochoices
