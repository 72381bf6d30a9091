#pragma once

#include <span>

namespace hinf
{
  struct LineFit
  {
    double slope = 0.0;
    double intercept = 0.0;
  };

  /// Least-squares line through (x_i, y_i).
  LineFit linear_fit(std::span<const double> x, std::span<const double> y);

  /// Slope of log y against log x; all values must be positive.
  double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hinf
