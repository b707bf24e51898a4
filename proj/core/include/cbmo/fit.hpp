#pragma once

#include <optional>
#include <span>

namespace cbmo {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

/// Ordinary least squares y = slope * x + intercept. With fewer than two
/// distinct abscissae the slope is 0. r_squared is 1 for an exact fit,
/// including the degenerate case of constant y.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log(value) against log(scale) over the points whose scale lies
/// within a factor 10 of the largest one (the "last decade"). Points with
/// non-positive value are skipped; empty when fewer than two remain.
std::optional<LineFit> last_decade_fit(std::span<const double> scales,
                                       std::span<const double> values);

/// Least-squares slope through the origin, y = slope * x.
double fit_slope_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace cbmo
