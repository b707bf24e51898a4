#include "cbmo/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cbmo/errors.hpp"

namespace cbmo {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit out;
  const std::size_t n = std::min(x.size(), y.size());
  out.points = static_cast<int>(n);
  if (n == 0) return out;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) {
    out.intercept = my;
    out.r_squared = syy <= 0.0 ? 1.0 : 0.0;
    return out;
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r_squared = syy <= 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return out;
}

double fit_slope_through_origin(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::optional<LineFit> last_decade_fit(std::span<const double> scales,
                                       std::span<const double> values) {
  if (scales.size() != values.size()) throw InvalidInput("scale and value lists differ in length");
  double top = 0.0;
  for (double s : scales) top = std::max(top, s);
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] >= top / 10.0 && scales[i] > 0.0 && values[i] > 0.0) {
      lx.push_back(std::log(scales[i]));
      ly.push_back(std::log(values[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  return fit_line(lx, ly);
}

}  // namespace cbmo
