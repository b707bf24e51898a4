#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbmo/exponent.hpp"
#include "cbmo/geometry.hpp"
#include "cbmo/quadrature.hpp"

namespace cbmo {

enum class FuncKind {
  zero,
  constant,
  chi_interval,
  chi_annulus,
  power,
  sign,
  dyadic_step,
  scaled_ball,
  linear_combination,
  product_with_sign,
  pointwise_abs,
  product,
  abs_power,
  lr_aggregate,
  dual_extremizer,
  operator_output,
};

std::string to_string(FuncKind k);

enum class Parity { even, odd, none };

namespace detail {
struct FuncNode;
}

/// Hooks for functions whose values come from a computation (operator
/// outputs). Everything the catalog knows structurally must be supplied.
struct LazyFuncSpec {
  std::function<double(double)> eval;
  std::vector<double> singular_points;
  double support_radius = 0.0;  // may be +inf
  Parity parity = Parity::none;
  /// Upper bound of |f| on {r_in <= |x| <= r_out}; may return +inf.
  std::function<double(double, double)> abs_bound;
  std::string description;
};

/// A real function on R from a closed catalog, with exact support and
/// singularity metadata so quadrature can split at every jump.
///
/// In dimension n >= 2 an even Func is read as a radial profile.
class Func {
 public:
  static Func zero();
  static Func constant(double c);
  /// Indicator of the closed interval [a, b].
  static Func chi_interval(double a, double b);
  /// Indicator of {r_in <= |x| < r_out}.
  static Func chi_annulus(double r_in, double r_out);
  static Func chi_ball(double r) { return chi_annulus(0.0, r); }
  /// Indicator of the dyadic ring C_k.
  static Func chi_ring(int k);
  /// |x|^a.
  static Func power(double a);
  static Func sign();
  /// sum_{k=0}^{k_max} 2^k chi_{A_k}(x) sgn(x), A_k = {2^k < |x| <= 2^k + 1}.
  static Func dyadic_step(int k_max = 40);
  /// f_0(x) = |x|^n |B|^{-1} chi_B(x) for B = B(0, r) in R^n.
  static Func scaled_ball(double r, int dim = 1);
  static Func linear_combination(std::vector<std::pair<double, Func>> terms);
  static Func with_sign(const Func& f);
  static Func abs(const Func& f);
  static Func product(const Func& f, const Func& g);
  /// |f|^s, s > 0.
  static Func abs_power(const Func& f, double s);
  /// Pointwise l^r aggregate (sum_j |f_j|^r)^{1/r}.
  static Func lr_aggregate(std::vector<Func> fs, double r);
  /// sgn(f) |f / lambda|^{p(x) - 1}: attains the duality pairing for f.
  static Func dual_extremizer(const Func& f, const Exponent& e, double lambda);
  static Func operator_output(LazyFuncSpec spec);

  FuncKind kind() const;

  /// Unchecked evaluation (hot path). Values at jump points follow each
  /// kind's convention.
  double operator()(double x) const;
  /// Checked evaluation; throws InvalidInput at a singular point.
  double evaluate(double x) const;

  /// Sorted points where f jumps, kinks or is unbounded.
  std::span<const double> singular_points() const;
  /// Smallest R with f = 0 outside B(0, R); +inf when not compactly supported.
  double support_radius() const;
  Parity parity() const;
  /// True when a single evaluation runs a quadrature.
  bool is_expensive() const;
  /// Conservative upper bound of |f| on {r_in <= |x| <= r_out}.
  double abs_bound(double r_in, double r_out) const;
  /// True when the catalog structure proves f = 0.
  bool is_structurally_zero() const;

  std::string describe() const;

 private:
  explicit Func(std::shared_ptr<const detail::FuncNode> node);
  std::shared_ptr<const detail::FuncNode> node_;
};

Func operator+(const Func& f, const Func& g);
Func operator-(const Func& f, const Func& g);
Func operator*(double c, const Func& f);
/// f - c.
Func shifted(const Func& f, double c);

/// Average of f over B(0, r): (1/|B|) \int_B f.
QuadResult mean_on_ball(const Func& f, const Ball& ball, const QuadOptions& opts = {});

/// \int_{B} f, splitting at f's singular points.
QuadResult integrate_func_ball(const Func& f, const Ball& ball, const QuadOptions& opts = {});

/// \int_{R^n} f (radial when n >= 2).
QuadResult integrate_func_full(const Func& f, int dim = 1, const QuadOptions& opts = {});

}  // namespace cbmo
