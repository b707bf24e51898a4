#pragma once

#include <vector>

#include "cbmo/func.hpp"
#include "cbmo/quadrature.hpp"

namespace cbmo {

struct OperatorSample {
  double x = 0.0;
  double value = 0.0;
  double abs_error_bound = 0.0;
};

/// Dimension and quadrature settings shared by the Hardy-type operators.
/// For dim >= 2 functions are radial profiles and x is a radius.
struct OperatorOptions {
  int dim = 1;
  QuadOptions quad;
};

/// Hf(x) = |x|^{-n} \int_{|y| <= |x|} f(y) dy.
OperatorSample hardy(const Func& f, double x, const OperatorOptions& opts = {});

/// H*f(x) = \int_{|y| > |x|} f(y) / |y|^n dy.
OperatorSample dual_hardy(const Func& f, double x, const OperatorOptions& opts = {});

/// [b, H]f(x) = |x|^{-n} \int_{|y| <= |x|} (b(x) - b(y)) f(y) dy.
OperatorSample commutator_hardy(const Func& b, const Func& f, double x,
                                const OperatorOptions& opts = {});

/// [b, H*]f(x) = \int_{|y| > |x|} (b(x) - b(y)) f(y) / |y|^n dy.
OperatorSample commutator_dual_hardy(const Func& b, const Func& f, double x,
                                     const OperatorOptions& opts = {});

/// Grid of radii 2^{j / 4}, j = j_min..j_max.
std::vector<double> default_maximal_grid(int j_min = -40, int j_max = 40);

struct MaximalSample {
  double x = 0.0;
  /// max over radii of |B(x, r)|^{-1} \int_{B(x, r)} |f|.
  double value = 0.0;
  /// The same supremum with the r^{-n} normalization; equals v_n * value.
  double radius_normalized = 0.0;
  double best_radius = 0.0;
  double abs_error_bound = 0.0;
};

/// Grid approximation of the Hardy-Littlewood maximal function in dimension 1.
/// The grid is extended by every |x - s| for s a singular point of f, so
/// averages that peak at a jump are caught. Underestimates the true supremum.
MaximalSample maximal(const Func& f, double x, const std::vector<double>& radius_grid = {},
                      const QuadOptions& opts = {});

/// The operators above as lazily evaluated functions, with their singular
/// points (origin, +-|s| for every singular point s of b and f), support and
/// a coarse sup bound registered so norms can integrate them.
Func hardy_func(const Func& f, const OperatorOptions& opts = {});
Func dual_hardy_func(const Func& f, const OperatorOptions& opts = {});
Func commutator_hardy_func(const Func& b, const Func& f, const OperatorOptions& opts = {});
Func commutator_dual_hardy_func(const Func& b, const Func& f, const OperatorOptions& opts = {});

}  // namespace cbmo
