#pragma once

#include <functional>
#include <span>

#include "cbmo/geometry.hpp"

namespace cbmo {

struct QuadOptions {
  double abs_tol = 1e-9;
  /// Relative floor so that large integrals are not held to an absolute
  /// target below double precision.
  double rel_tol = 1e-11;
  int max_subdivisions = 4000;
};

struct QuadResult {
  double value = 0.0;
  double abs_error_bound = 0.0;
  int subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// How a 1-D profile is interpreted on balls and annuli in dimension n >= 2.
enum class Symmetry { general, radial };

/// Globally adaptive Gauss-Kronrod (7/15) integration of g over [a, b].
///
/// The range is split at every breakpoint before adaptation, so integrands
/// with known jumps converge at the smooth rate. Either end may be infinite;
/// infinite pieces are mapped onto (0, 1] by x = a + L (1 - t) / t.
/// Throws NonConvergence (carrying the best estimate) when the subdivision
/// budget runs out before the error bound reaches max(abs_tol, rel_tol |I|).
QuadResult integrate_interval(const Integrand& g, double a, double b,
                              std::span<const double> breakpoints = {},
                              const QuadOptions& opts = {});

/// Integral over B(0, r). In dimension 1 the ball is [-r, r] split at the
/// origin; for n >= 2 the integrand must be radial and the integral is
/// n v_n \int_0^r g(rho) rho^{n-1} d rho.
QuadResult integrate_ball(const Integrand& g, const Ball& ball,
                          std::span<const double> breakpoints = {},
                          Symmetry symmetry = Symmetry::general,
                          const QuadOptions& opts = {});

/// Integral over the annulus {r_in <= |x| < r_out}; r_out may be infinite.
QuadResult integrate_annulus(const Integrand& g, const Annulus& annulus,
                             std::span<const double> breakpoints = {},
                             Symmetry symmetry = Symmetry::general,
                             const QuadOptions& opts = {});

/// Integral over the dyadic ring C_k = {2^{k-1} <= |x| < 2^k}.
QuadResult integrate_dyadic_ring(const Integrand& g, int k, int dim = 1,
                                 std::span<const double> breakpoints = {},
                                 Symmetry symmetry = Symmetry::general,
                                 const QuadOptions& opts = {});

}  // namespace cbmo
