#pragma once

#include <span>

namespace twochoices {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y ~ intercept + slope * x. Needs at least two
/// distinct x values.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace twochoices
