#pragma once

// Reference computations that share no code with the library: composite
// Gauss-Legendre on caller-supplied pieces and plain scalar bisection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Composite 5-point Gauss-Legendre with `panels` equal panels on [a, b].
inline double gauss(const std::function<double(double)>& g, double a, double b, int panels = 2000) {
  static const double xs[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640, -0.9061798459386640};
  static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                               0.2369268850561891};
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * h;
    for (int k = 0; k < 5; ++k) sum += ws[k] * g(mid + 0.5 * h * xs[k]);
  }
  return 0.5 * h * sum;
}

/// Sum of gauss() over consecutive pieces [cuts[i], cuts[i+1]].
inline double piecewise(const std::function<double(double)>& g, std::vector<double> cuts, int panels = 2000) {
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += gauss(g, cuts[i], cuts[i + 1], panels);
  return s;
}

/// Root of an increasing function on [lo, hi] to absolute width tol.
inline double bisect(const std::function<double(double)>& fn, double lo, double hi, double tol = 1e-14) {
  for (int i = 0; i < 400 && hi - lo > tol * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (fn(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Luxemburg norm from a modular evaluated by the caller: the lambda where
/// rho(lambda) = \int |f / lambda|^p = 1.
inline double luxemburg(const std::function<double(double)>& rho_of_lambda, double lo = 1e-6, double hi = 1e6) {
  return bisect([&](double lam) { return 1.0 - rho_of_lambda(lam); }, lo, hi);
}

/// Real root of lambda^3 = lambda + 1.
inline double plastic_number() {
  return bisect([](double l) { return l * l * l - l - 1.0; }, 1.0, 2.0);
}

inline bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(b), 1e-300); }

}  // namespace oracle
