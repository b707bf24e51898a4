#include "cbmo/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>

#include "cbmo/errors.hpp"

namespace cbmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_domain(const Domain& d) {
  if (d.dim < 1) throw InvalidInput("domain dimension must be >= 1");
  if (d.kind == Domain::Kind::full) return;
  if (!(d.r_in >= 0.0) || !(d.r_out > d.r_in))
    throw InvalidInput("domain radii must satisfy 0 <= r_in < r_out");
}

void check_pair(const Func& f, const Exponent& e, const Domain& d) {
  check_domain(d);
  if (e.dimension() != d.dim)
    throw InvalidInput("exponent dimension " + std::to_string(e.dimension()) +
                       " does not match domain dimension " + std::to_string(d.dim));
  if (d.dim >= 2 && f.parity() != Parity::even)
    throw InvalidInput("norms in dimension >= 2 need a radial (even) function");
}

// Portion of the domain where f can be nonzero.
Annulus effective_annulus(const Func& f, const Domain& d) {
  const double r_in = d.kind == Domain::Kind::annulus ? d.r_in : 0.0;
  const double r_out = d.kind == Domain::Kind::full ? kInf : d.r_out;
  const double supp = f.support_radius();
  return {std::min(r_in, supp), std::min(r_out, supp), d.dim};
}

std::vector<double> merged_breakpoints(const Func& f, const Exponent& e) {
  std::vector<double> bps(f.singular_points().begin(), f.singular_points().end());
  bps.insert(bps.end(), e.breakpoints().begin(), e.breakpoints().end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return bps;
}

// Wraps an expensive function so repeated modular evaluations during one
// norm computation reuse its values. The cache dies with the wrapper.
Func memoized(const Func& f) {
  if (!f.is_expensive()) return f;
  auto cache = std::make_shared<std::unordered_map<double, double>>();
  LazyFuncSpec spec;
  spec.eval = [f, cache](double x) {
    auto it = cache->find(x);
    if (it != cache->end()) return it->second;
    const double v = f(x);
    cache->emplace(x, v);
    return v;
  };
  spec.singular_points.assign(f.singular_points().begin(), f.singular_points().end());
  spec.support_radius = f.support_radius();
  spec.parity = f.parity();
  spec.abs_bound = [f](double a, double b) { return f.abs_bound(a, b); };
  spec.description = f.describe();
  return Func::operator_output(std::move(spec));
}

std::optional<double> constant_on_region(const Exponent& e, const Annulus& region) {
  const auto right = e.constant_on(region.r_in, region.r_out);
  if (!right || e.dimension() != 1) return right;
  const auto left = e.constant_on(-region.r_out, -region.r_in);
  if (left && *left == *right) return right;
  return std::nullopt;
}

// Root of log rho = 0 on the line through (log lo, log r_lo), (log hi, log r_hi),
// clamped to the bracket; the midpoint when the data cannot support it.
double log_interpolate(double lo, double hi, double r_lo, double r_hi) {
  const double mid = 0.5 * (lo + hi);
  if (!(lo > 0.0) || !(r_lo > 1.0) || !(r_hi > 0.0) || !(r_hi <= 1.0) || !std::isfinite(r_lo))
    return mid;
  const double a = std::log(r_lo);
  const double b = std::log(r_hi);
  if (!(a - b > 0.0)) return mid;
  const double t = a / (a - b);
  return std::clamp(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))), lo, hi);
}

QuadResult modular_impl(const Func& f, const Exponent& e, const Annulus& region,
                        std::span<const double> bps, double lambda, const QuadOptions& opts) {
  if (region.r_out <= region.r_in) return {};
  const double inv = 1.0 / lambda;
  const Integrand g = [&f, &e, inv](double x) {
    const double v = std::fabs(f(x)) * inv;
    if (v == 0.0) return 0.0;
    return std::pow(v, e(x));
  };
  return integrate_annulus(g, region, bps, region.dim >= 2 ? Symmetry::radial : Symmetry::general,
                           opts);
}

}  // namespace

Domain Domain::ball(double r, int dim) { return {Kind::ball, 0.0, r, dim}; }

Domain Domain::annulus(double r_in, double r_out, int dim) {
  return {Kind::annulus, r_in, r_out, dim};
}

Domain Domain::ring(int k, int dim) {
  return {Kind::annulus, std::ldexp(1.0, k - 1), std::ldexp(1.0, k), dim};
}

Domain Domain::full(int dim) { return {Kind::full, 0.0, kInf, dim}; }

double Domain::measure() const {
  switch (kind) {
    case Kind::full:
      return kInf;
    case Kind::ball:
      return Ball{r_out, dim}.volume();
    case Kind::annulus:
      return Annulus{r_in, r_out, dim}.volume();
  }
  return kInf;
}

Func Domain::indicator() const {
  switch (kind) {
    case Kind::full:
      return Func::constant(1.0);
    case Kind::ball:
      return Func::chi_ball(r_out);
    case Kind::annulus:
      return Func::chi_annulus(r_in, r_out);
  }
  return Func::constant(1.0);
}

QuadResult modular(const Func& f, const Exponent& e, const Domain& domain,
                   const QuadOptions& opts) {
  return scaled_modular(f, e, domain, 1.0, opts);
}

QuadResult scaled_modular(const Func& f, const Exponent& e, const Domain& domain, double lambda,
                          const QuadOptions& opts) {
  check_pair(f, e, domain);
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInput("modular scale lambda must be positive and finite");
  if (f.is_structurally_zero()) return {};
  const auto bps = merged_breakpoints(f, e);
  return modular_impl(f, e, effective_annulus(f, domain), bps, lambda, opts);
}

NormResult luxemburg_norm(const Func& f_in, const Exponent& e, const Domain& domain,
                          const NormOptions& opts) {
  check_pair(f_in, e, domain);
  if (!e.is_in_P(0.0)) throw InvalidInput("exponent is not in P: " + e.describe());
  if (f_in.is_structurally_zero()) return {};

  const Func f = memoized(f_in);
  const Annulus region = effective_annulus(f, domain);
  if (region.r_out <= region.r_in) return {};
  const auto bps = merged_breakpoints(f, e);

  double last_err = 0.0;
  // rho(f / lambda); quadrature that cannot converge is read as +inf.
  auto rho = [&](double lambda) {
    try {
      const QuadResult q = modular_impl(f, e, region, bps, lambda, opts.quad);
      last_err = q.abs_error_bound;
      return std::isfinite(q.value) ? q.value : kInf;
    } catch (const NonConvergence&) {
      last_err = kInf;
      return kInf;
    }
  };

  const double r1 = rho(1.0);
  const double r1_err = last_err;
  if (r1 <= opts.zero_threshold && rho(opts.zero_probe_scale) <= opts.zero_threshold) return {};

  // Constant exponent on the region: ||f|| = rho(f)^{1/p} exactly.
  if (const auto pc = constant_on_region(e, region); pc && std::isfinite(r1) && r1 > 0.0) {
    NormResult out;
    out.value = std::pow(r1, 1.0 / *pc);
    out.bracket_lo = out.bracket_hi = out.value;
    out.abs_error_bound = std::isfinite(r1_err) ? out.value * r1_err / (*pc * r1) : kInf;
    return out;
  }

  const double p_minus = e.p_minus();
  const double p_plus = e.p_plus();
  double lambda0 = 1.0;
  {
    const double sup = f.abs_bound(region.r_in, region.r_out);
    const double meas = region.volume();
    if (std::isfinite(sup) && sup > 0.0 && std::isfinite(meas) && meas > 0.0)
      lambda0 = sup * std::pow(meas, 1.0 / p_plus);
  }

  double lo = 0.0;
  double hi = 0.0;
  int infinite_run = 0;
  auto note_value = [&](double r) {
    infinite_run = std::isfinite(r) ? 0 : infinite_run + 1;
    if (infinite_run >= 3)
      throw NotInSpace("modular of " + f.describe() + " is infinite at every scale tried");
  };

  double r_lo = kInf;
  double r_hi = 0.0;
  double r0 = rho(lambda0);
  note_value(r0);
  int expansions = 0;
  if (r0 > 1.0) {
    lo = lambda0;
    r_lo = r0;
    hi = 4.0 * lambda0;
    for (double r = rho(hi); r > 1.0; r = rho(hi)) {
      note_value(r);
      if (++expansions > opts.max_expansions)
        throw NotInSpace("modular of " + f.describe() + " stays above 1 after bracket expansion");
      lo = hi;
      r_lo = r;
      hi *= 4.0;
    }
    r_hi = rho(hi);
  } else {
    hi = lambda0;
    r_hi = r0;
    lo = 0.25 * lambda0;
    for (double r = rho(lo); r <= 1.0; r = rho(lo)) {
      if (++expansions > opts.max_expansions)
        throw NonConvergence("Luxemburg bracket expansion did not reach rho > 1", hi, hi);
      hi = lo;
      r_hi = r;
      lo *= 0.25;
    }
    r_lo = rho(lo);
  }

  NormResult out;
  double value = 0.5 * (lo + hi);
  double mod_err = 0.0;
  bool hit = false;
  while (hi - lo > std::max(opts.width_abs, opts.width_rel * hi)) {
    if (out.bisection_iters >= opts.max_bisections)
      throw NonConvergence("Luxemburg bisection budget exhausted", 0.5 * (lo + hi), hi - lo);
    const double mid = 0.5 * (lo + hi);
    const double r = rho(mid);
    ++out.bisection_iters;
    mod_err = last_err;
    if (std::fabs(r - 1.0) <= opts.modular_tol) {
      value = mid;
      hit = true;
      break;
    }
    if (r > 1.0) {
      lo = mid;
      r_lo = r;
    } else {
      hi = mid;
      r_hi = r;
    }
  }
  if (!hit) value = log_interpolate(lo, hi, r_lo, r_hi);
  out.value = value;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  // d rho / d lambda is at least p_- rho / lambda near rho = 1.
  const double quad_shift = std::isfinite(mod_err) ? value * mod_err / p_minus : 0.0;
  out.abs_error_bound = (hit ? 0.0 : 0.5 * (hi - lo)) + quad_shift;
  return out;
}

NormResult chi_norm(const Domain& domain, const Exponent& e, const NormOptions& opts) {
  check_domain(domain);
  if (domain.kind == Domain::Kind::full)
    throw NotInSpace("the indicator of the whole space is not in a variable Lebesgue space");
  if (e.dimension() != domain.dim)
    throw InvalidInput("exponent dimension does not match domain dimension");
  std::optional<double> p;
  if (domain.dim == 1) {
    const auto right = e.constant_on(domain.r_in, domain.r_out);
    const auto left = e.constant_on(-domain.r_out, -domain.r_in);
    if (right && left && *right == *left) p = right;
  } else {
    p = e.constant_on(domain.r_in, domain.r_out);
  }
  if (p) {
    NormResult out;
    out.value = std::pow(domain.measure(), 1.0 / *p);
    out.bracket_lo = out.bracket_hi = out.value;
    return out;
  }
  return luxemburg_norm(domain.indicator(), e, Domain::full(domain.dim), opts);
}

double duality_constant(const Exponent& e) { return 1.0 + 1.0 / e.p_minus() + 1.0 / e.p_plus(); }

DualBracket dual_pairing_sup(const Func& f, const Exponent& e, std::span<const Func> dual_bank,
                             const NormOptions& opts) {
  if (dual_bank.empty()) throw InvalidInput("dual bank is empty");
  DualBracket out;
  out.r_p = duality_constant(e);
  const int dim = e.dimension();
  const NormResult fn = luxemburg_norm(f, e, Domain::full(dim), opts);
  out.norm = fn.value;
  out.upper = out.r_p * fn.value;
  if (fn.value == 0.0) return out;
  const Exponent conj = e.conjugate();
  for (std::size_t i = 0; i < dual_bank.size(); ++i) {
    const Func& g = dual_bank[i];
    const double gn = luxemburg_norm(g, conj, Domain::full(dim), opts).value;
    if (!(gn > 0.0)) continue;
    const double pair = std::fabs(integrate_func_full(Func::product(f, g), dim, opts.quad).value);
    const double v = pair / gn;
    if (v > out.lower) {
      out.lower = v;
      out.best_index = static_cast<int>(i);
    }
  }
  return out;
}

std::vector<Func> default_dual_bank(const Func& f, const Exponent& e, const NormOptions& opts) {
  std::vector<Func> bank{Func::chi_interval(0.0, 1.0), Func::chi_ball(1.0)};
  const double R = f.support_radius();
  if (std::isfinite(R) && R > 0.0) {
    bank.push_back(Func::chi_ball(R));
    bank.push_back(Func::product(Func::sign(), Func::chi_ball(R)));
  }
  if (!f.is_structurally_zero()) {
    const double n = luxemburg_norm(f, e, Domain::full(e.dimension()), opts).value;
    if (n > 0.0) {
      bank.push_back(f);
      bank.push_back(Func::dual_extremizer(f, e, n));
    }
  }
  return bank;
}

}  // namespace cbmo
