#include "cbmo/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cbmo/errors.hpp"
#include "cbmo/fit.hpp"
#include "parallel.hpp"

namespace cbmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string ball_name(double r) { return "B(0, " + std::to_string(r) + ")"; }

// Re-raises a failure with the ball (or ring) it happened on, keeping its type.
template <class Fn>
auto on_scale(const std::string& where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const NotInSpace& e) {
    throw NotInSpace("on " + where + ": " + e.what());
  } catch (const NonConvergence& e) {
    throw NonConvergence("on " + where + ": " + e.what(), e.partial_estimate(), e.error_estimate());
  } catch (const InvalidInput& e) {
    throw InvalidInput("on " + where + ": " + e.what());
  }
}

std::vector<double> grid_or_default(std::span<const double> grid) {
  std::vector<double> g(grid.begin(), grid.end());
  if (g.empty()) g = dyadic_radius_grid();
  for (double r : g)
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("radius grid entries must be positive and finite");
  return g;
}

struct Ratio {
  double value = 0.0;
  double error = 0.0;
  double center = 0.0;
};

Ratio oscillation_ratio(const Func& f, const Exponent& e, double r, double c,
                        const SpaceOptions& opts) {
  const int dim = e.dimension();
  const NormResult den = chi_norm(Domain::ball(r, dim), e, opts.norm);
  const NormResult num = luxemburg_norm(shifted(f, c), e, Domain::ball(r, dim), opts.norm);
  Ratio out;
  out.value = num.value / den.value;
  out.error = num.abs_error_bound / den.value + num.value * den.abs_error_bound / (den.value * den.value);
  out.center = c;
  return out;
}

void finish_sup(SpaceNormResult& res, const SpaceOptions& opts) {
  res.value = 0.0;
  std::vector<double> scales;
  std::vector<double> values;
  for (const auto& [r, v] : res.breakdown) {
    res.value = std::max(res.value, v);
    scales.push_back(r);
    values.push_back(v);
  }
  const auto fit = last_decade_fit(scales, values);
  if (!fit) return;
  res.divergence_fit = DivergenceFit{fit->slope, fit->r_squared, fit->points};
  res.diverges = fit->slope > opts.divergence_slope && fit->r_squared > opts.divergence_min_r2;
}

template <class PerBall>
SpaceNormResult sup_over_grid(const std::vector<double>& grid, const SpaceOptions& opts,
                              PerBall&& per_ball) {
  std::vector<Ratio> ratios(grid.size());
  detail::parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
    ratios[i] = on_scale(ball_name(grid[i]), [&] { return per_ball(i, grid[i]); });
  });
  SpaceNormResult res;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    res.breakdown.push_back({grid[i], ratios[i].value});
    res.abs_error_bound = std::max(res.abs_error_bound, ratios[i].error);
    res.centers.push_back(ratios[i].center);
  }
  finish_sup(res, opts);
  return res;
}

// Range of f over B(0, r) from uniform samples plus one point inside every
// piece between consecutive singular points.
std::pair<double, double> sampled_range(const Func& f, double r, int dim) {
  const double a = dim >= 2 ? 0.0 : -r;
  std::vector<double> xs;
  constexpr int kSamples = 2048;
  for (int i = 0; i <= kSamples; ++i) xs.push_back(a + (r - a) * i / kSamples);
  std::vector<double> cuts{a};
  for (double s : f.singular_points())
    if (s > a && s < r) cuts.push_back(s);
  cuts.push_back(r);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) xs.push_back(0.5 * (cuts[i] + cuts[i + 1]));
  double lo = kInf;
  double hi = -kInf;
  for (double x : xs) {
    const double v = f(x);
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

double chi_ring_upper(int k, const Exponent& e) {
  const double m = Annulus::dyadic_ring(k, e.dimension()).volume();
  return std::max(std::pow(m, 1.0 / e.p_minus()), std::pow(m, 1.0 / e.p_plus()));
}

double ring_bound(const Func& f, const Exponent& e, int k) {
  const double s = f.abs_bound(std::ldexp(1.0, k - 1), std::ldexp(1.0, k));
  if (std::isnan(s)) return kInf;
  if (s == 0.0) return 0.0;
  return s * chi_ring_upper(k, e);
}

}  // namespace

std::vector<double> dyadic_radius_grid(int k_min, int k_max) {
  std::vector<double> g;
  for (int k = k_min; k <= k_max; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

SpaceNormResult cbmo_var_norm(const Func& f, const Exponent& e, std::span<const double> radius_grid,
                              const SpaceOptions& opts) {
  return cbmo_star_norm(f, e, CenterRule::ball_average(), radius_grid, opts);
}

SpaceNormResult cbmo_classical_norm(const Func& f, double p, int dim,
                                    std::span<const double> radius_grid, const SpaceOptions& opts) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("classical CBMO needs 1 <= p < inf");
  const auto grid = grid_or_default(radius_grid);
  const Exponent e = Exponent::constant(p, dim);
  return sup_over_grid(grid, opts, [&](std::size_t, double r) {
    const double vol = Ball{r, dim}.volume();
    const double c = mean_on_ball(f, Ball{r, dim}, opts.norm.quad).value;
    const QuadResult q = modular(shifted(f, c), e, Domain::ball(r, dim), opts.norm.quad);
    Ratio out;
    out.center = c;
    out.value = std::pow(q.value / vol, 1.0 / p);
    if (q.value > 0.0) out.error = out.value * q.abs_error_bound / (p * q.value);
    return out;
  });
}

SpaceNormResult cbmo_star_norm(const Func& f, const Exponent& e, const CenterRule& rule,
                               std::span<const double> radius_grid, const SpaceOptions& opts) {
  const auto grid = grid_or_default(radius_grid);
  if (rule.kind == CenterRule::Kind::per_ball_list && rule.centers.size() != grid.size())
    throw InvalidInput("center list has " + std::to_string(rule.centers.size()) +
                       " entries for a grid of " + std::to_string(grid.size()));
  const int dim = e.dimension();
  return sup_over_grid(grid, opts, [&](std::size_t i, double r) {
    double c = rule.value;
    if (rule.kind == CenterRule::Kind::ball_average)
      c = mean_on_ball(f, Ball{r, dim}, opts.norm.quad).value;
    else if (rule.kind == CenterRule::Kind::per_ball_list)
      c = rule.centers[i];
    return oscillation_ratio(f, e, r, c, opts);
  });
}

SpaceNormResult cbmo_inf_norm(const Func& f, const Exponent& e, std::span<const double> radius_grid,
                              const SpaceOptions& opts) {
  const auto grid = grid_or_default(radius_grid);
  const int dim = e.dimension();
  return sup_over_grid(grid, opts, [&](std::size_t, double r) {
    const double f_b = mean_on_ball(f, Ball{r, dim}, opts.norm.quad).value;
    Ratio best = oscillation_ratio(f, e, r, f_b, opts);
    auto [lo, hi] = sampled_range(f, r, dim);
    if (!(hi > lo)) {
      // f is constant on B: the oscillation vanishes at c = that constant.
      if (std::isfinite(lo)) return Ratio{0.0, 0.0, lo};
      return best;
    }
    const double pad = 0.01 * (hi - lo);
    double a = lo - pad;
    double b = hi + pad;
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = b - inv_phi * (b - a);
    double c2 = a + inv_phi * (b - a);
    Ratio v1 = oscillation_ratio(f, e, r, c1, opts);
    Ratio v2 = oscillation_ratio(f, e, r, c2, opts);
    while (b - a > opts.center_tol * (1.0 + std::fabs(0.5 * (a + b)))) {
      if (v1.value <= v2.value) {
        b = c2;
        c2 = c1;
        v2 = v1;
        c1 = b - inv_phi * (b - a);
        v1 = oscillation_ratio(f, e, r, c1, opts);
      } else {
        a = c1;
        c1 = c2;
        v1 = v2;
        c2 = a + inv_phi * (b - a);
        v2 = oscillation_ratio(f, e, r, c2, opts);
      }
    }
    for (const Ratio& v : {v1, v2})
      if (v.value < best.value) best = v;
    return best;
  });
}

HerzRings herz_rings(const Func& f, const Exponent& e, int k_min, int k_max,
                     const SpaceOptions& opts) {
  if (k_max < k_min) throw InvalidInput("Herz ring range is empty");
  HerzRings out;
  out.k_min = k_min;
  out.k_max = k_max;
  const int dim = e.dimension();
  const std::size_t count = static_cast<std::size_t>(k_max - k_min + 1);
  out.norms.resize(count);
  out.errors.resize(count);
  detail::parallel_for(count, opts.threads, [&](std::size_t i) {
    const int k = k_min + static_cast<int>(i);
    const NormResult n = on_scale("ring C_" + std::to_string(k),
                                  [&] { return luxemburg_norm(f, e, Domain::ring(k, dim), opts.norm); });
    out.norms[i] = n.value;
    out.errors[i] = n.abs_error_bound;
  });
  for (int j = 1; j <= opts.tail_rings; ++j) out.lower_tail.push_back(ring_bound(f, e, k_min - j));
  const double R = f.support_radius();
  if (std::isfinite(R)) {
    // Rings C_k with 2^{k-1} >= R carry nothing; the rest are computed exactly.
    const int last = static_cast<int>(std::ceil(std::log2(R))) + 1;
    for (int k = k_max + 1; k <= last; ++k) {
      if (k - k_max > opts.tail_rings) {
        out.upper_tail.push_back(ring_bound(f, e, k));
        continue;
      }
      const NormResult n = on_scale("ring C_" + std::to_string(k),
                                    [&] { return luxemburg_norm(f, e, Domain::ring(k, dim), opts.norm); });
      out.upper_tail.push_back(n.value + n.abs_error_bound);
    }
  } else {
    for (int j = 1; j <= opts.tail_rings; ++j) out.upper_tail.push_back(ring_bound(f, e, k_max + j));
  }
  return out;
}

SpaceNormResult herz_aggregate(const HerzRings& rings, double alpha, double q,
                               const SpaceOptions& opts, HerzBranch branch) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidInput("Herz index q must satisfy 0 < q < inf");
  if (branch == HerzBranch::automatic) branch = q <= 1.0 ? HerzBranch::q_triangle : HerzBranch::minkowski;
  if (branch == HerzBranch::q_triangle && q > 1.0)
    throw InvalidInput("the q-triangle branch needs q <= 1");
  if (branch == HerzBranch::minkowski && q < 1.0)
    throw InvalidInput("the Minkowski branch needs q >= 1");
  if (!std::isfinite(alpha)) throw InvalidInput("Herz index alpha must be finite");
  SpaceNormResult res;
  double S = 0.0;
  double E = 0.0;
  for (std::size_t i = 0; i < rings.norms.size(); ++i) {
    const int k = rings.k_min + static_cast<int>(i);
    const double w = std::exp2(alpha * k);
    const double a = w * rings.norms[i];
    res.breakdown.push_back({static_cast<double>(k), a});
    S += std::pow(a, q);
    E += std::pow(w * rings.errors[i], q);
  }
  res.value = std::pow(S, 1.0 / q);

  double T = 0.0;
  auto add_tail = [&](const std::vector<double>& bounds, int k0, int step, bool must_decay) {
    double last = 0.0;
    for (std::size_t j = 0; j < bounds.size(); ++j) {
      const int k = k0 + step * static_cast<int>(j);
      last = std::pow(std::exp2(alpha * k) * bounds[j], q);
      T += last;
    }
    // A scan that ends on a term that has not died out certifies nothing.
    if (must_decay && !bounds.empty() && !(last <= 1e-20 * std::max(S, 1.0))) T = kInf;
  };
  add_tail(rings.lower_tail, rings.k_min - 1, -1, true);
  const bool upper_is_exact = !rings.upper_tail.empty() &&
                              static_cast<int>(rings.upper_tail.size()) < opts.tail_rings;
  add_tail(rings.upper_tail, rings.k_max + 1, 1, !upper_is_exact);

  if (branch == HerzBranch::q_triangle) {
    res.tail_bound = std::pow(S + T, 1.0 / q) - res.value;
    res.abs_error_bound = std::pow(S + E, 1.0 / q) - res.value;
  } else {
    res.tail_bound = std::pow(T, 1.0 / q);
    res.abs_error_bound = std::pow(E, 1.0 / q);
  }
  if (!std::isfinite(res.tail_bound) || res.tail_bound > opts.tail_rel_tol * std::max(res.value, 1.0))
    throw NonConvergence("Herz tail outside k in [" + std::to_string(rings.k_min) + ", " +
                             std::to_string(rings.k_max) + "] is not controlled",
                         res.value, res.tail_bound);
  return res;
}

SpaceNormResult herz_norm(const Func& f, const Exponent& e, double alpha, double q, int k_min,
                          int k_max, const SpaceOptions& opts) {
  if (!(q > 0.0) || !std::isfinite(q)) throw InvalidInput("Herz index q must satisfy 0 < q < inf");
  return herz_aggregate(herz_rings(f, e, k_min, k_max, opts), alpha, q, opts);
}

SpaceNormResult herz_norm_vector(std::span<const Func> fs, double r, const Exponent& e,
                                 double alpha, double q, int k_min, int k_max,
                                 const SpaceOptions& opts) {
  if (fs.empty()) throw InvalidInput("vector-valued Herz norm needs at least one function");
  if (!(r > 1.0) || !std::isfinite(r)) throw InvalidInput("l^r index must satisfy 1 < r < inf");
  const Func agg = Func::lr_aggregate(std::vector<Func>(fs.begin(), fs.end()), r);
  return herz_norm(agg, e, alpha, q, k_min, k_max, opts);
}

}  // namespace cbmo
