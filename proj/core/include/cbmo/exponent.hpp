#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbmo/report.hpp"

namespace cbmo {

enum class ExponentKind { constant, piecewise, smooth, custom };

/// Closed-form smooth exponents p(x) = base + amplitude * shape(|x|).
enum class SmoothFormula {
  inv_one_plus_abs,  // 1 / (1 + |x|)
  inv_one_plus_sq,   // 1 / (1 + x^2)
  sin_log_log,       // sin(log log(10 + |x|)); has no limit at infinity
};

std::string to_string(SmoothFormula f);
std::optional<SmoothFormula> smooth_formula_from_string(const std::string& s);

namespace detail {
struct ExponentNode;
}

/// A variable exponent p(.) with cached essential bounds.
///
/// Values are immutable and cheap to copy (shared node). In dimension n >= 2
/// the exponent is radial and is evaluated at the radius |x|.
class Exponent {
 public:
  static Exponent constant(double p, int dim = 1);
  /// breaks b_1 < ... < b_m and values v_0..v_m: p = v_i on [b_i, b_{i+1}),
  /// with b_0 = -inf and b_{m+1} = +inf.
  static Exponent piecewise(std::vector<double> breaks, std::vector<double> values,
                            int dim = 1);
  static Exponent smooth(SmoothFormula formula, double base, double amplitude,
                         int dim = 1);
  /// Arbitrary evaluable exponent. Bounds are estimated by dense sampling over
  /// [-working_radius, working_radius]; known jump points may be supplied so
  /// quadrature can split there.
  static Exponent custom(std::function<double(double)> fn, int dim = 1,
                         double working_radius = 0x1p20,
                         std::vector<double> breakpoints = {});

  ExponentKind kind() const;
  int dimension() const;
  double p_minus() const;
  double p_plus() const;

  /// Unchecked evaluation (hot path).
  double operator()(double x) const;
  /// Checked evaluation; throws InvalidInput outside the working domain.
  double evaluate(double x) const;

  /// Points where p jumps or is not smooth.
  std::span<const double> breakpoints() const;

  /// p'(x) = p(x) / (p(x) - 1). conjugate().conjugate() returns the original.
  Exponent conjugate() const;
  /// x -> factor * p(x); used for p(.)/p0.
  Exponent scaled(double factor) const;

  /// The value when p is constant everywhere.
  std::optional<double> constant_value() const;
  /// The value when p is a.e. constant on the interval [a, b].
  std::optional<double> constant_on(double a, double b) const;

  /// Membership in P: p_- > 1 + margin and p_+ finite.
  bool is_in_P(double margin = 1e-9) const;

  std::string describe() const;

  // Introspection used by serializers.
  std::span<const double> piecewise_breaks() const;
  std::span<const double> piecewise_values() const;
  std::optional<SmoothFormula> smooth_formula() const;
  double smooth_base() const;
  double smooth_amplitude() const;
  bool is_conjugated() const;
  double scale_factor() const;

 private:
  explicit Exponent(std::shared_ptr<const detail::ExponentNode> node);
  std::shared_ptr<const detail::ExponentNode> node_;
};

/// Sampling parameters for the log-Hoelder check.
struct LogHolderOptions {
  int sample_budget = 513;      // uniform samples on [-4, 4]
  int decay_window_log2 = 64;   // largest window is |x| <= 2^this
  int finest_scale_log2 = 52;   // smallest |x - y| is 2^-this
  double cap = 100.0;           // both constants must stay under this
  double growth_tol = 0.02;     // max slope of the constants across scales
};

/// Estimates the local and decay log-Hoelder constants by sampling.
/// Reports pass iff both stay under the cap and stop growing with scale.
CheckReport log_holder_check(const Exponent& e, const LogHolderOptions& opts = {});

}  // namespace cbmo
