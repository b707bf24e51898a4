#include "cbmo/func.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "cbmo/errors.hpp"

namespace cbmo {

namespace detail {

struct FuncNode {
  FuncKind kind = FuncKind::zero;
  double a = 0.0;  // constant value / interval start / inner radius / power / scale radius
  double b = 0.0;  // interval end / outer radius / exponent s or r / lambda
  int k_max = 0;
  int dim = 1;
  std::vector<std::pair<double, Func>> terms;
  std::vector<Func> children;
  std::optional<Exponent> exponent;
  LazyFuncSpec lazy;

  std::vector<double> singular;
  double support = 0.0;
  Parity parity = Parity::none;
  bool expensive = false;
};

}  // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void normalize(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Largest k with 2^k < ax, for ax > 1.
int dyadic_index(double ax) {
  int e = 0;
  const double m = std::frexp(ax, &e);
  return m == 0.5 ? e - 2 : e - 1;
}

bool interval_meets_annulus(double a, double b, double r_in, double r_out) {
  // [a, b] against [-r_out, -r_in] u [r_in, r_out]
  return (a <= -r_in && b >= -r_out) || (a <= r_out && b >= r_in);
}

Parity combine_sum(const std::vector<Parity>& ps) {
  bool all_even = true, all_odd = true;
  for (Parity p : ps) {
    all_even = all_even && p == Parity::even;
    all_odd = all_odd && p == Parity::odd;
  }
  if (all_even) return Parity::even;
  if (all_odd) return Parity::odd;
  return Parity::none;
}

Parity abs_parity(Parity p) { return p == Parity::none ? Parity::none : Parity::even; }

}  // namespace

std::string to_string(FuncKind k) {
  switch (k) {
    case FuncKind::zero: return "zero";
    case FuncKind::constant: return "constant";
    case FuncKind::chi_interval: return "chi_interval";
    case FuncKind::chi_annulus: return "chi_annulus";
    case FuncKind::power: return "power";
    case FuncKind::sign: return "sign";
    case FuncKind::dyadic_step: return "dyadic_step";
    case FuncKind::scaled_ball: return "scaled_ball";
    case FuncKind::linear_combination: return "linear_combination";
    case FuncKind::product_with_sign: return "product_with_sign";
    case FuncKind::pointwise_abs: return "pointwise_abs";
    case FuncKind::product: return "product";
    case FuncKind::abs_power: return "abs_power";
    case FuncKind::lr_aggregate: return "lr_aggregate";
    case FuncKind::dual_extremizer: return "dual_extremizer";
    case FuncKind::operator_output: return "operator_output";
  }
  return "unknown";
}

Func::Func(std::shared_ptr<const detail::FuncNode> node) : node_(std::move(node)) {}

Func Func::zero() {
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::zero;
  n->parity = Parity::even;
  return Func(std::move(n));
}

Func Func::constant(double c) {
  if (!std::isfinite(c)) throw InvalidInput("constant function value must be finite");
  if (c == 0.0) return zero();
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::constant;
  n->a = c;
  n->support = kInf;
  n->parity = Parity::even;
  return Func(std::move(n));
}

Func Func::chi_interval(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a <= b))
    throw InvalidInput("chi_interval needs finite a <= b");
  if (a == b) return zero();
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::chi_interval;
  n->a = a;
  n->b = b;
  n->singular = {a, b};
  n->support = std::max(std::abs(a), std::abs(b));
  n->parity = (a == -b) ? Parity::even : Parity::none;
  return Func(std::move(n));
}

Func Func::chi_annulus(double r_in, double r_out) {
  if (!(r_in >= 0.0) || !std::isfinite(r_out) || !(r_out >= r_in))
    throw InvalidInput("chi_annulus needs 0 <= r_in <= r_out < inf");
  if (r_in == r_out) return zero();
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::chi_annulus;
  n->a = r_in;
  n->b = r_out;
  n->singular = {-r_out, r_out};
  if (r_in > 0.0) {
    n->singular.push_back(-r_in);
    n->singular.push_back(r_in);
  }
  normalize(n->singular);
  n->support = r_out;
  n->parity = Parity::even;
  return Func(std::move(n));
}

Func Func::chi_ring(int k) { return chi_annulus(std::ldexp(1.0, k - 1), std::ldexp(1.0, k)); }

Func Func::power(double a) {
  if (!std::isfinite(a)) throw InvalidInput("power exponent must be finite");
  if (a == 0.0) return constant(1.0);
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::power;
  n->a = a;
  n->singular = {0.0};
  n->support = kInf;
  n->parity = Parity::even;
  return Func(std::move(n));
}

Func Func::sign() {
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::sign;
  n->singular = {0.0};
  n->support = kInf;
  n->parity = Parity::odd;
  return Func(std::move(n));
}

Func Func::dyadic_step(int k_max) {
  if (k_max < 0 || k_max > 1000) throw InvalidInput("dyadic_step k_max must lie in [0, 1000]");
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::dyadic_step;
  n->k_max = k_max;
  for (int k = 0; k <= k_max; ++k) {
    const double lo = std::ldexp(1.0, k);
    const double hi = lo + 1.0;
    n->singular.insert(n->singular.end(), {-hi, -lo, lo, hi});
  }
  normalize(n->singular);
  n->support = std::ldexp(1.0, k_max) + 1.0;
  n->parity = Parity::odd;
  return Func(std::move(n));
}

Func Func::scaled_ball(double r, int dim) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("scaled_ball radius must be positive");
  if (dim < 1) throw InvalidInput("scaled_ball dimension must be >= 1");
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::scaled_ball;
  n->a = r;
  n->dim = dim;
  n->singular = {-r, r};
  n->support = r;
  n->parity = Parity::even;
  return Func(std::move(n));
}

Func Func::linear_combination(std::vector<std::pair<double, Func>> terms) {
  std::vector<std::pair<double, Func>> kept;
  for (auto& [c, f] : terms) {
    if (!std::isfinite(c)) throw InvalidInput("linear_combination coefficient must be finite");
    if (c == 0.0 || f.is_structurally_zero()) continue;
    if (f.kind() == FuncKind::linear_combination) {
      for (const auto& [c2, f2] : f.node_->terms) kept.emplace_back(c * c2, f2);
    } else {
      kept.emplace_back(c, f);
    }
  }
  if (kept.empty()) return zero();
  if (kept.size() == 1 && kept[0].first == 1.0) return kept[0].second;
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::linear_combination;
  std::vector<Parity> ps;
  for (const auto& [c, f] : kept) {
    const auto sp = f.singular_points();
    n->singular.insert(n->singular.end(), sp.begin(), sp.end());
    n->support = std::max(n->support, f.support_radius());
    ps.push_back(f.parity());
    n->expensive = n->expensive || f.is_expensive();
  }
  normalize(n->singular);
  n->parity = combine_sum(ps);
  n->terms = std::move(kept);
  return Func(std::move(n));
}

Func Func::with_sign(const Func& f) {
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::product_with_sign;
  n->children = {f};
  const auto sp = f.singular_points();
  n->singular.assign(sp.begin(), sp.end());
  n->singular.push_back(0.0);
  normalize(n->singular);
  n->support = f.support_radius();
  n->parity = f.parity() == Parity::even  ? Parity::odd
              : f.parity() == Parity::odd ? Parity::even
                                          : Parity::none;
  n->expensive = f.is_expensive();
  return Func(std::move(n));
}

Func Func::abs(const Func& f) {
  if (f.is_structurally_zero()) return zero();
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::pointwise_abs;
  n->children = {f};
  const auto sp = f.singular_points();
  n->singular.assign(sp.begin(), sp.end());
  n->support = f.support_radius();
  n->parity = abs_parity(f.parity());
  n->expensive = f.is_expensive();
  return Func(std::move(n));
}

Func Func::product(const Func& f, const Func& g) {
  if (f.is_structurally_zero() || g.is_structurally_zero()) return zero();
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::product;
  n->children = {f, g};
  for (const Func& h : n->children) {
    const auto sp = h.singular_points();
    n->singular.insert(n->singular.end(), sp.begin(), sp.end());
  }
  normalize(n->singular);
  n->support = std::min(f.support_radius(), g.support_radius());
  const Parity pf = f.parity(), pg = g.parity();
  if (pf == Parity::none || pg == Parity::none)
    n->parity = Parity::none;
  else
    n->parity = pf == pg ? Parity::even : Parity::odd;
  n->expensive = f.is_expensive() || g.is_expensive();
  return Func(std::move(n));
}

Func Func::abs_power(const Func& f, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("abs_power exponent must be positive");
  if (f.is_structurally_zero()) return zero();
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::abs_power;
  n->children = {f};
  n->b = s;
  const auto sp = f.singular_points();
  n->singular.assign(sp.begin(), sp.end());
  n->support = f.support_radius();
  n->parity = abs_parity(f.parity());
  n->expensive = f.is_expensive();
  return Func(std::move(n));
}

Func Func::lr_aggregate(std::vector<Func> fs, double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw InvalidInput("lr_aggregate needs 1 <= r < inf");
  if (fs.empty()) throw InvalidInput("lr_aggregate needs at least one function");
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::lr_aggregate;
  n->b = r;
  std::vector<Parity> ps;
  for (const Func& f : fs) {
    const auto sp = f.singular_points();
    n->singular.insert(n->singular.end(), sp.begin(), sp.end());
    n->support = std::max(n->support, f.support_radius());
    ps.push_back(abs_parity(f.parity()));
    n->expensive = n->expensive || f.is_expensive();
  }
  normalize(n->singular);
  n->parity = combine_sum(ps);
  n->children = std::move(fs);
  return Func(std::move(n));
}

Func Func::dual_extremizer(const Func& f, const Exponent& e, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInput("dual_extremizer needs a positive finite lambda");
  if (f.is_structurally_zero()) return zero();
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::dual_extremizer;
  n->children = {f};
  n->exponent = e;
  n->b = lambda;
  const auto sp = f.singular_points();
  n->singular.assign(sp.begin(), sp.end());
  const auto eb = e.breakpoints();
  n->singular.insert(n->singular.end(), eb.begin(), eb.end());
  normalize(n->singular);
  n->support = f.support_radius();
  n->parity = e.constant_value() ? f.parity() : Parity::none;
  n->expensive = f.is_expensive();
  return Func(std::move(n));
}

Func Func::operator_output(LazyFuncSpec spec) {
  if (!spec.eval) throw InvalidInput("operator_output needs an evaluator");
  auto n = std::make_shared<detail::FuncNode>();
  n->kind = FuncKind::operator_output;
  normalize(spec.singular_points);
  n->singular = spec.singular_points;
  n->support = spec.support_radius;
  n->parity = spec.parity;
  n->expensive = true;
  n->lazy = std::move(spec);
  return Func(std::move(n));
}

FuncKind Func::kind() const { return node_->kind; }
std::span<const double> Func::singular_points() const { return node_->singular; }
double Func::support_radius() const { return node_->support; }
Parity Func::parity() const { return node_->parity; }
bool Func::is_expensive() const { return node_->expensive; }
bool Func::is_structurally_zero() const { return node_->kind == FuncKind::zero; }

double Func::operator()(double x) const {
  const auto& n = *node_;
  switch (n.kind) {
    case FuncKind::zero:
      return 0.0;
    case FuncKind::constant:
      return n.a;
    case FuncKind::chi_interval:
      return (x >= n.a && x <= n.b) ? 1.0 : 0.0;
    case FuncKind::chi_annulus: {
      const double ax = std::abs(x);
      return (ax >= n.a && ax < n.b) ? 1.0 : 0.0;
    }
    case FuncKind::power:
      return std::pow(std::abs(x), n.a);
    case FuncKind::sign:
      return sgn(x);
    case FuncKind::dyadic_step: {
      const double ax = std::abs(x);
      if (!(ax > 1.0)) return 0.0;
      const int k = dyadic_index(ax);
      if (k < 0 || k > n.k_max) return 0.0;
      const double lo = std::ldexp(1.0, k);
      return ax <= lo + 1.0 ? lo * sgn(x) : 0.0;
    }
    case FuncKind::scaled_ball: {
      const double ax = std::abs(x);
      if (!(ax < n.a)) return 0.0;
      return std::pow(ax, n.dim) / (unit_ball_volume(n.dim) * std::pow(n.a, n.dim));
    }
    case FuncKind::linear_combination: {
      double s = 0.0;
      for (const auto& [c, f] : n.terms) s += c * f(x);
      return s;
    }
    case FuncKind::product_with_sign:
      return n.children[0](x) * sgn(x);
    case FuncKind::pointwise_abs:
      return std::abs(n.children[0](x));
    case FuncKind::product:
      return n.children[0](x) * n.children[1](x);
    case FuncKind::abs_power:
      return std::pow(std::abs(n.children[0](x)), n.b);
    case FuncKind::lr_aggregate: {
      double s = 0.0;
      for (const Func& f : n.children) s += std::pow(std::abs(f(x)), n.b);
      return std::pow(s, 1.0 / n.b);
    }
    case FuncKind::dual_extremizer: {
      const double v = n.children[0](x);
      if (v == 0.0) return 0.0;
      return sgn(v) * std::pow(std::abs(v) / n.b, (*n.exponent)(x)-1.0);
    }
    case FuncKind::operator_output:
      return n.lazy.eval(x);
  }
  return 0.0;
}

double Func::evaluate(double x) const {
  if (!std::isfinite(x)) throw InvalidInput("function evaluated at a non-finite point");
  if (std::binary_search(node_->singular.begin(), node_->singular.end(), x)) {
    std::ostringstream os;
    os << describe() << " evaluated at its singular point " << x;
    throw InvalidInput(os.str());
  }
  return (*this)(x);
}

double Func::abs_bound(double r_in, double r_out) const {
  const auto& n = *node_;
  if (r_out < r_in) return 0.0;
  switch (n.kind) {
    case FuncKind::zero:
      return 0.0;
    case FuncKind::constant:
      return std::abs(n.a);
    case FuncKind::chi_interval:
      return interval_meets_annulus(n.a, n.b, r_in, r_out) ? 1.0 : 0.0;
    case FuncKind::chi_annulus:
      return (r_out >= n.a && r_in < n.b) ? 1.0 : 0.0;
    case FuncKind::power:
      if (n.a > 0.0) return std::pow(r_out, n.a);
      return r_in > 0.0 ? std::pow(r_in, n.a) : kInf;
    case FuncKind::sign:
      return 1.0;
    case FuncKind::dyadic_step: {
      double best = 0.0;
      for (int k = 0; k <= n.k_max; ++k) {
        const double lo = std::ldexp(1.0, k);
        if (lo < r_out && lo + 1.0 >= r_in) best = lo;
      }
      return best;
    }
    case FuncKind::scaled_ball:
      if (r_in >= n.a) return 0.0;
      return std::pow(std::min(r_out, n.a) / n.a, n.dim) / unit_ball_volume(n.dim);
    case FuncKind::linear_combination: {
      double s = 0.0;
      for (const auto& [c, f] : n.terms) s += std::abs(c) * f.abs_bound(r_in, r_out);
      return s;
    }
    case FuncKind::product_with_sign:
    case FuncKind::pointwise_abs:
      return n.children[0].abs_bound(r_in, r_out);
    case FuncKind::product: {
      const double u = n.children[0].abs_bound(r_in, r_out);
      const double v = n.children[1].abs_bound(r_in, r_out);
      return (u == 0.0 || v == 0.0) ? 0.0 : u * v;
    }
    case FuncKind::abs_power:
      return std::pow(n.children[0].abs_bound(r_in, r_out), n.b);
    case FuncKind::lr_aggregate: {
      double s = 0.0;
      for (const Func& f : n.children) s += std::pow(f.abs_bound(r_in, r_out), n.b);
      return std::pow(s, 1.0 / n.b);
    }
    case FuncKind::dual_extremizer: {
      const double u = n.children[0].abs_bound(r_in, r_out) / n.b;
      if (u == 0.0) return 0.0;
      return std::max(std::pow(u, n.exponent->p_plus() - 1.0),
                      std::pow(u, n.exponent->p_minus() - 1.0));
    }
    case FuncKind::operator_output:
      return n.lazy.abs_bound ? n.lazy.abs_bound(r_in, r_out) : kInf;
  }
  return kInf;
}

std::string Func::describe() const {
  const auto& n = *node_;
  std::ostringstream os;
  os.precision(10);
  switch (n.kind) {
    case FuncKind::zero: os << "0"; break;
    case FuncKind::constant: os << n.a; break;
    case FuncKind::chi_interval: os << "chi[" << n.a << "," << n.b << "]"; break;
    case FuncKind::chi_annulus:
      if (n.a == 0.0)
        os << "chi_B(0," << n.b << ")";
      else
        os << "chi{" << n.a << "<=|x|<" << n.b << "}";
      break;
    case FuncKind::power: os << "|x|^" << n.a; break;
    case FuncKind::sign: os << "sgn"; break;
    case FuncKind::dyadic_step: os << "dyadic_step(" << n.k_max << ")"; break;
    case FuncKind::scaled_ball: os << "f0(B(0," << n.a << "),n=" << n.dim << ")"; break;
    case FuncKind::linear_combination:
      for (std::size_t i = 0; i < n.terms.size(); ++i) {
        if (i) os << " + ";
        if (n.terms[i].first != 1.0) os << n.terms[i].first << "*";
        os << n.terms[i].second.describe();
      }
      break;
    case FuncKind::product_with_sign: os << "sgn*(" << n.children[0].describe() << ")"; break;
    case FuncKind::pointwise_abs: os << "|" << n.children[0].describe() << "|"; break;
    case FuncKind::product:
      os << "(" << n.children[0].describe() << ")*(" << n.children[1].describe() << ")";
      break;
    case FuncKind::abs_power: os << "|" << n.children[0].describe() << "|^" << n.b; break;
    case FuncKind::lr_aggregate:
      os << "l^" << n.b << "{";
      for (std::size_t i = 0; i < n.children.size(); ++i)
        os << (i ? ", " : "") << n.children[i].describe();
      os << "}";
      break;
    case FuncKind::dual_extremizer:
      os << "extremizer(" << n.children[0].describe() << ", " << n.exponent->describe() << ")";
      break;
    case FuncKind::operator_output: os << n.lazy.description; break;
  }
  return os.str();
}

Func operator+(const Func& f, const Func& g) { return Func::linear_combination({{1.0, f}, {1.0, g}}); }
Func operator-(const Func& f, const Func& g) { return Func::linear_combination({{1.0, f}, {-1.0, g}}); }
Func operator*(double c, const Func& f) { return Func::linear_combination({{c, f}}); }
Func shifted(const Func& f, double c) {
  return Func::linear_combination({{1.0, f}, {1.0, Func::constant(-c)}});
}

QuadResult integrate_func_ball(const Func& f, const Ball& ball, const QuadOptions& opts) {
  const bool radial = ball.dim >= 2;
  if (radial && f.parity() != Parity::even)
    throw InvalidInput("ball integrals in dimension >= 2 need a radial (even) function");
  const Integrand g = [&f](double x) { return f(x); };
  const double r = std::min(ball.radius, f.support_radius());
  return integrate_ball(g, Ball{r, ball.dim}, f.singular_points(),
                        radial ? Symmetry::radial : Symmetry::general, opts);
}

QuadResult mean_on_ball(const Func& f, const Ball& ball, const QuadOptions& opts) {
  if (!(ball.radius > 0.0)) throw InvalidInput("mean_on_ball needs a ball of positive radius");
  QuadResult q = integrate_func_ball(f, ball, opts);
  const double vol = ball.volume();
  q.value /= vol;
  q.abs_error_bound /= vol;
  return q;
}

QuadResult integrate_func_full(const Func& f, int dim, const QuadOptions& opts) {
  const bool radial = dim >= 2;
  if (radial && f.parity() != Parity::even)
    throw InvalidInput("integrals in dimension >= 2 need a radial (even) function");
  const Integrand g = [&f](double x) { return f(x); };
  return integrate_annulus(g, Annulus{0.0, f.support_radius(), dim}, f.singular_points(),
                           radial ? Symmetry::radial : Symmetry::general, opts);
}

}  // namespace cbmo
