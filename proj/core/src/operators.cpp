#include "cbmo/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cbmo/errors.hpp"

namespace cbmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_args(const Func& f, double x, const OperatorOptions& opts) {
  if (opts.dim < 1) throw InvalidInput("dimension must be >= 1");
  if (!std::isfinite(x)) throw InvalidInput("operator point must be finite");
  if (x == 0.0) throw InvalidInput("Hardy-type operators are evaluated at x != 0");
  if (opts.dim >= 2) {
    if (x < 0.0) throw InvalidInput("in dimension >= 2 the point is a radius and must be > 0");
    if (f.parity() != Parity::even)
      throw InvalidInput("in dimension >= 2 functions must be radial (even)");
  }
}

Symmetry symmetry_for(int dim) { return dim >= 2 ? Symmetry::radial : Symmetry::general; }

std::vector<double> union_points(const Func& a, const Func& b) {
  std::vector<double> pts(a.singular_points().begin(), a.singular_points().end());
  pts.insert(pts.end(), b.singular_points().begin(), b.singular_points().end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Symmetrized singular set: 0 and +-|s|. Hardy-type outputs depend on |x|
// through the integration radius, so they kink wherever |x| crosses a jump.
std::vector<double> radial_singular_set(std::vector<double> pts) {
  std::vector<double> out{0.0};
  for (double s : pts) {
    out.push_back(std::fabs(s));
    out.push_back(-std::fabs(s));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

OperatorSample inner(const Integrand& g, double r, std::span<const double> bps,
                     const OperatorOptions& opts, double x) {
  const QuadResult q = integrate_ball(g, Ball{r, opts.dim}, bps, symmetry_for(opts.dim), opts.quad);
  const double scale = std::pow(std::fabs(x), -opts.dim);
  return {x, q.value * scale, q.abs_error_bound * scale};
}

OperatorSample outer(const Integrand& g, double r_in, double r_out, std::span<const double> bps,
                     const OperatorOptions& opts, double x) {
  if (r_out <= r_in) return {x, 0.0, 0.0};
  const QuadResult q =
      integrate_annulus(g, Annulus{r_in, r_out, opts.dim}, bps, symmetry_for(opts.dim), opts.quad);
  return {x, q.value, q.abs_error_bound};
}

// sup |f| over B(0, r), or +inf.
double sup_on(const Func& f, double r_in, double r_out) {
  const double v = f.abs_bound(r_in, r_out);
  return std::isnan(v) ? kInf : v;
}

// \int_{r_in <= |y| < R_f} |f(y)| / |y|^n dy <= n v_n sup|f| log(R_f / r_in).
double dual_tail_bound(const Func& f, double r_in, int dim) {
  const double R = f.support_radius();
  if (!(r_in > 0.0) || !std::isfinite(R)) return kInf;
  if (r_in >= R) return 0.0;
  return dim * unit_ball_volume(dim) * sup_on(f, r_in, R) * std::log(R / r_in);
}

// \int |f|, or +inf when it cannot be certified.
double l1_norm(const Func& f, const OperatorOptions& opts) {
  if (opts.dim >= 2 && f.parity() != Parity::even) return kInf;
  try {
    return integrate_func_full(Func::abs(f), opts.dim, opts.quad).value;
  } catch (const Error&) {
    return kInf;
  }
}

// H and H* integrate over symmetric sets, so H g is even and vanishes for odd g.
Parity output_parity(const Func& b, const Func& f) {
  const Parity pb = b.parity();
  const Parity pf = f.parity();
  if (pb == Parity::even) return Parity::even;
  if (pb == Parity::odd && pf == Parity::even) return Parity::odd;
  if (pb == Parity::odd && pf == Parity::odd) return Parity::even;
  return Parity::none;
}

}  // namespace

OperatorSample hardy(const Func& f, double x, const OperatorOptions& opts) {
  check_args(f, x, opts);
  if (f.is_structurally_zero()) return {x, 0.0, 0.0};
  const Integrand g = [&f](double y) { return f(y); };
  const double r = std::min(std::fabs(x), f.support_radius());
  return inner(g, r, f.singular_points(), opts, x);
}

OperatorSample dual_hardy(const Func& f, double x, const OperatorOptions& opts) {
  check_args(f, x, opts);
  if (f.is_structurally_zero()) return {x, 0.0, 0.0};
  const int n = opts.dim;
  const Integrand g = [&f, n](double y) {
    const double v = f(y);
    return v == 0.0 ? 0.0 : v / std::pow(std::fabs(y), n);
  };
  return outer(g, std::fabs(x), f.support_radius(), f.singular_points(), opts, x);
}

namespace {

void check_symbol(const Func& b, const OperatorOptions& opts) {
  if (opts.dim >= 2 && b.parity() != Parity::even)
    throw InvalidInput("in dimension >= 2 the symbol must be radial (even)");
}

OperatorSample commutator_hardy_at(const Func& b, const Func& f, double x, double bx,
                                   const OperatorOptions& opts) {
  if (f.is_structurally_zero()) return {x, 0.0, 0.0};
  const Integrand g = [&b, &f, bx](double y) {
    const double v = f(y);
    return v == 0.0 ? 0.0 : (bx - b(y)) * v;
  };
  const auto bps = union_points(b, f);
  const double r = std::min(std::fabs(x), f.support_radius());
  return inner(g, r, bps, opts, x);
}

OperatorSample commutator_dual_hardy_at(const Func& b, const Func& f, double x, double bx,
                                        const OperatorOptions& opts) {
  if (f.is_structurally_zero()) return {x, 0.0, 0.0};
  const int n = opts.dim;
  const Integrand g = [&b, &f, bx, n](double y) {
    const double v = f(y);
    return v == 0.0 ? 0.0 : (bx - b(y)) * v / std::pow(std::fabs(y), n);
  };
  const auto bps = union_points(b, f);
  return outer(g, std::fabs(x), f.support_radius(), bps, opts, x);
}

}  // namespace

OperatorSample commutator_hardy(const Func& b, const Func& f, double x,
                                const OperatorOptions& opts) {
  check_args(f, x, opts);
  check_symbol(b, opts);
  return commutator_hardy_at(b, f, x, b.evaluate(x), opts);
}

OperatorSample commutator_dual_hardy(const Func& b, const Func& f, double x,
                                     const OperatorOptions& opts) {
  check_args(f, x, opts);
  check_symbol(b, opts);
  return commutator_dual_hardy_at(b, f, x, b.evaluate(x), opts);
}

std::vector<double> default_maximal_grid(int j_min, int j_max) {
  std::vector<double> grid;
  for (int j = j_min; j <= j_max; ++j) grid.push_back(std::exp2(0.25 * j));
  return grid;
}

MaximalSample maximal(const Func& f, double x, const std::vector<double>& radius_grid,
                      const QuadOptions& opts) {
  if (!std::isfinite(x)) throw InvalidInput("maximal function point must be finite");
  MaximalSample out;
  out.x = x;
  if (f.is_structurally_zero()) return out;
  std::vector<double> radii = radius_grid.empty() ? default_maximal_grid() : radius_grid;
  for (double s : f.singular_points())
    if (s != x) radii.push_back(std::fabs(x - s));
  const double R = f.support_radius();
  if (std::isfinite(R)) {
    radii.push_back(std::fabs(x - R));
    radii.push_back(std::fabs(x + R));
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  const Integrand g = [&f](double y) { return std::fabs(f(y)); };
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) continue;
    const QuadResult q = integrate_interval(g, x - r, x + r, f.singular_points(), opts);
    const double avg = q.value / (2.0 * r);
    if (avg > out.value) {
      out.value = avg;
      out.best_radius = r;
      out.abs_error_bound = q.abs_error_bound / (2.0 * r);
    }
  }
  out.radius_normalized = unit_ball_volume(1) * out.value;
  return out;
}

Func hardy_func(const Func& f, const OperatorOptions& opts) {
  LazyFuncSpec spec;
  spec.eval = [f, opts](double x) { return x == 0.0 ? 0.0 : hardy(f, x, opts).value; };
  spec.singular_points = radial_singular_set({f.singular_points().begin(), f.singular_points().end()});
  spec.support_radius = kInf;
  spec.parity = Parity::even;
  const int n = opts.dim;
  const double l1 = l1_norm(f, opts);
  spec.abs_bound = [f, n, l1](double r_in, double r_out) {
    const double near = unit_ball_volume(n) * sup_on(f, 0.0, r_out);
    return r_in > 0.0 ? std::min(near, l1 / std::pow(r_in, n)) : near;
  };
  spec.description = "H(" + f.describe() + ")";
  return Func::operator_output(std::move(spec));
}

Func dual_hardy_func(const Func& f, const OperatorOptions& opts) {
  LazyFuncSpec spec;
  spec.eval = [f, opts](double x) { return x == 0.0 ? 0.0 : dual_hardy(f, x, opts).value; };
  spec.singular_points = radial_singular_set({f.singular_points().begin(), f.singular_points().end()});
  spec.support_radius = f.support_radius();
  spec.parity = Parity::even;
  const int n = opts.dim;
  spec.abs_bound = [f, n](double r_in, double) { return dual_tail_bound(f, r_in, n); };
  spec.description = "H*(" + f.describe() + ")";
  return Func::operator_output(std::move(spec));
}

Func commutator_hardy_func(const Func& b, const Func& f, const OperatorOptions& opts) {
  LazyFuncSpec spec;
  spec.eval = [b, f, opts](double x) {
    return x == 0.0 ? 0.0 : commutator_hardy_at(b, f, x, b(x), opts).value;
  };
  spec.singular_points = radial_singular_set(union_points(b, f));
  spec.support_radius = kInf;
  spec.parity = output_parity(b, f);
  const int n = opts.dim;
  const double l1 = l1_norm(f, opts);
  spec.abs_bound = [b, f, n, l1](double r_in, double r_out) {
    const double near = unit_ball_volume(n) * sup_on(f, 0.0, r_out);
    const double mass = r_in > 0.0 ? std::min(near, l1 / std::pow(r_in, n)) : near;
    return 2.0 * sup_on(b, 0.0, r_out) * mass;
  };
  spec.description = "[" + b.describe() + ", H](" + f.describe() + ")";
  return Func::operator_output(std::move(spec));
}

Func commutator_dual_hardy_func(const Func& b, const Func& f, const OperatorOptions& opts) {
  LazyFuncSpec spec;
  spec.eval = [b, f, opts](double x) {
    return x == 0.0 ? 0.0 : commutator_dual_hardy_at(b, f, x, b(x), opts).value;
  };
  spec.singular_points = radial_singular_set(union_points(b, f));
  spec.support_radius = f.support_radius();
  spec.parity = output_parity(b, f);
  const int n = opts.dim;
  spec.abs_bound = [b, f, n](double r_in, double) {
    const double R = f.support_radius();
    return 2.0 * sup_on(b, 0.0, std::max(R, r_in)) * dual_tail_bound(f, r_in, n);
  };
  spec.description = "[" + b.describe() + ", H*](" + f.describe() + ")";
  return Func::operator_output(std::move(spec));
}

}  // namespace cbmo
