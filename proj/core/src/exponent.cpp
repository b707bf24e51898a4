#include "cbmo/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <variant>

#include "cbmo/errors.hpp"
#include "cbmo/fit.hpp"

namespace cbmo {

namespace detail {

struct ConstantExp {
  double p;
};
struct PiecewiseExp {
  std::vector<double> breaks;
  std::vector<double> values;
};
struct SmoothExp {
  SmoothFormula formula;
  double base;
  double amplitude;
};
struct CustomExp {
  std::function<double(double)> fn;
  double working_radius;
};
struct ConjugateExp {
  Exponent inner;
};
struct ScaledExp {
  Exponent inner;
  double factor;
};

struct ExponentNode {
  std::variant<ConstantExp, PiecewiseExp, SmoothExp, CustomExp, ConjugateExp, ScaledExp> body;
  int dim = 1;
  double p_minus = 0.0;
  double p_plus = 0.0;
  std::vector<double> breakpoints;
};

}  // namespace detail

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double conj(double p) { return p / (p - 1.0); }

double smooth_shape(SmoothFormula f, double x) {
  const double a = std::abs(x);
  switch (f) {
    case SmoothFormula::inv_one_plus_abs:
      return 1.0 / (1.0 + a);
    case SmoothFormula::inv_one_plus_sq:
      return 1.0 / (1.0 + a * a);
    case SmoothFormula::sin_log_log:
      return std::sin(std::log(std::log(10.0 + a)));
  }
  return 0.0;
}

void check_dim(int dim) {
  if (dim < 1) throw InvalidInput("exponent dimension must be >= 1");
}

}  // namespace

std::string to_string(SmoothFormula f) {
  switch (f) {
    case SmoothFormula::inv_one_plus_abs:
      return "inv_one_plus_abs";
    case SmoothFormula::inv_one_plus_sq:
      return "inv_one_plus_sq";
    case SmoothFormula::sin_log_log:
      return "sin_log_log";
  }
  return "unknown";
}

std::optional<SmoothFormula> smooth_formula_from_string(const std::string& s) {
  if (s == "inv_one_plus_abs") return SmoothFormula::inv_one_plus_abs;
  if (s == "inv_one_plus_sq") return SmoothFormula::inv_one_plus_sq;
  if (s == "sin_log_log") return SmoothFormula::sin_log_log;
  return std::nullopt;
}

Exponent::Exponent(std::shared_ptr<const detail::ExponentNode> node) : node_(std::move(node)) {}

Exponent Exponent::constant(double p, int dim) {
  check_dim(dim);
  if (!std::isfinite(p)) throw InvalidInput("constant exponent must be finite");
  auto n = std::make_shared<detail::ExponentNode>();
  n->body = detail::ConstantExp{p};
  n->dim = dim;
  n->p_minus = n->p_plus = p;
  return Exponent(std::move(n));
}

Exponent Exponent::piecewise(std::vector<double> breaks, std::vector<double> values, int dim) {
  check_dim(dim);
  if (values.size() != breaks.size() + 1)
    throw InvalidInput("piecewise exponent needs values.size() == breaks.size() + 1");
  if (!std::is_sorted(breaks.begin(), breaks.end()) ||
      std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end())
    throw InvalidInput("piecewise exponent breaks must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInput("piecewise exponent values must be finite");
  auto n = std::make_shared<detail::ExponentNode>();
  n->dim = dim;
  n->p_minus = *std::min_element(values.begin(), values.end());
  n->p_plus = *std::max_element(values.begin(), values.end());
  n->breakpoints = breaks;
  n->body = detail::PiecewiseExp{std::move(breaks), std::move(values)};
  return Exponent(std::move(n));
}

Exponent Exponent::smooth(SmoothFormula formula, double base, double amplitude, int dim) {
  check_dim(dim);
  if (!std::isfinite(base) || !std::isfinite(amplitude))
    throw InvalidInput("smooth exponent parameters must be finite");
  auto n = std::make_shared<detail::ExponentNode>();
  n->body = detail::SmoothExp{formula, base, amplitude};
  n->dim = dim;
  switch (formula) {
    case SmoothFormula::inv_one_plus_abs:
    case SmoothFormula::inv_one_plus_sq:
      // shape ranges over (0, 1], the infimum being the limit at infinity
      n->p_minus = base + std::min(0.0, amplitude);
      n->p_plus = base + std::max(0.0, amplitude);
      break;
    case SmoothFormula::sin_log_log:
      n->p_minus = base - std::abs(amplitude);
      n->p_plus = base + std::abs(amplitude);
      break;
  }
  if (formula == SmoothFormula::inv_one_plus_abs && amplitude != 0.0) n->breakpoints = {0.0};
  return Exponent(std::move(n));
}

Exponent Exponent::custom(std::function<double(double)> fn, int dim, double working_radius,
                          std::vector<double> breakpoints) {
  check_dim(dim);
  if (!fn) throw InvalidInput("custom exponent needs an evaluable function");
  if (!(working_radius > 0.0)) throw InvalidInput("working radius must be positive");
  auto n = std::make_shared<detail::ExponentNode>();
  n->dim = dim;
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  n->breakpoints = breakpoints;

  // Dense sampling: uniform near the origin, geometric out to the working radius.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto take = [&](double x) {
    const double v = fn(x);
    if (!std::isfinite(v)) throw InvalidInput("custom exponent is not evaluable at a sample");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  const double lower_x = dim == 1 ? -1.0 : 0.0;
  for (int i = 0; i <= 4096; ++i) take(lower_x + (1.0 - lower_x) * i / 4096.0);
  const int top = static_cast<int>(std::ceil(std::log2(working_radius) * 16.0));
  for (int i = 0; i <= top; ++i) {
    const double r = std::min(working_radius, std::exp2(i / 16.0));
    take(r);
    if (dim == 1) take(-r);
  }
  for (double b : breakpoints) {
    if (std::abs(b) > working_radius) continue;
    const double h = 1e-9 * std::max(1.0, std::abs(b));
    take(b - h);
    take(b + h);
  }
  n->p_minus = lo;
  n->p_plus = hi;
  n->body = detail::CustomExp{std::move(fn), working_radius};
  return Exponent(std::move(n));
}

ExponentKind Exponent::kind() const {
  return std::visit(overloaded{
                        [](const detail::ConstantExp&) { return ExponentKind::constant; },
                        [](const detail::PiecewiseExp&) { return ExponentKind::piecewise; },
                        [](const detail::SmoothExp&) { return ExponentKind::smooth; },
                        [](const detail::CustomExp&) { return ExponentKind::custom; },
                        [](const detail::ConjugateExp& c) { return c.inner.kind(); },
                        [](const detail::ScaledExp& s) { return s.inner.kind(); },
                    },
                    node_->body);
}

int Exponent::dimension() const { return node_->dim; }
double Exponent::p_minus() const { return node_->p_minus; }
double Exponent::p_plus() const { return node_->p_plus; }
std::span<const double> Exponent::breakpoints() const { return node_->breakpoints; }

double Exponent::operator()(double x) const {
  return std::visit(
      overloaded{
          [](const detail::ConstantExp& c) { return c.p; },
          [x](const detail::PiecewiseExp& pw) {
            const auto it = std::upper_bound(pw.breaks.begin(), pw.breaks.end(), x);
            return pw.values[static_cast<std::size_t>(it - pw.breaks.begin())];
          },
          [x](const detail::SmoothExp& s) { return s.base + s.amplitude * smooth_shape(s.formula, x); },
          [x](const detail::CustomExp& c) { return c.fn(x); },
          [x](const detail::ConjugateExp& c) { return conj(c.inner(x)); },
          [x](const detail::ScaledExp& s) { return s.factor * s.inner(x); },
      },
      node_->body);
}

double Exponent::evaluate(double x) const {
  if (!std::isfinite(x)) throw InvalidInput("exponent evaluated at a non-finite point");
  if (node_->dim >= 2 && x < 0.0)
    throw InvalidInput("radial exponent evaluated at a negative radius");
  if (const auto* c = std::get_if<detail::CustomExp>(&node_->body);
      c && std::abs(x) > c->working_radius)
    throw InvalidInput("custom exponent evaluated outside its working box");
  return (*this)(x);
}

Exponent Exponent::conjugate() const {
  if (const auto* c = std::get_if<detail::ConjugateExp>(&node_->body)) return c->inner;
  if (const auto* c = std::get_if<detail::ConstantExp>(&node_->body))
    return constant(conj(c->p), node_->dim);
  if (const auto* pw = std::get_if<detail::PiecewiseExp>(&node_->body)) {
    std::vector<double> vals = pw->values;
    for (double& v : vals) v = conj(v);
    return piecewise(pw->breaks, std::move(vals), node_->dim);
  }
  auto n = std::make_shared<detail::ExponentNode>();
  n->dim = node_->dim;
  n->breakpoints = node_->breakpoints;
  n->p_minus = conj(node_->p_plus);
  n->p_plus = conj(node_->p_minus);
  n->body = detail::ConjugateExp{*this};
  return Exponent(std::move(n));
}

Exponent Exponent::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw InvalidInput("exponent scale factor must be positive and finite");
  if (const auto* c = std::get_if<detail::ConstantExp>(&node_->body))
    return constant(c->p * factor, node_->dim);
  if (const auto* pw = std::get_if<detail::PiecewiseExp>(&node_->body)) {
    std::vector<double> vals = pw->values;
    for (double& v : vals) v *= factor;
    return piecewise(pw->breaks, std::move(vals), node_->dim);
  }
  if (const auto* s = std::get_if<detail::ScaledExp>(&node_->body))
    return s->inner.scaled(s->factor * factor);
  auto n = std::make_shared<detail::ExponentNode>();
  n->dim = node_->dim;
  n->breakpoints = node_->breakpoints;
  n->p_minus = factor * node_->p_minus;
  n->p_plus = factor * node_->p_plus;
  n->body = detail::ScaledExp{*this, factor};
  return Exponent(std::move(n));
}

std::optional<double> Exponent::constant_value() const {
  if (node_->p_minus == node_->p_plus) return node_->p_minus;
  return std::nullopt;
}

std::optional<double> Exponent::constant_on(double a, double b) const {
  if (auto c = constant_value()) return c;
  if (!(a < b)) return (*this)(a);
  return std::visit(
      overloaded{
          [](const detail::ConstantExp& c) -> std::optional<double> { return c.p; },
          [a, b](const detail::PiecewiseExp& pw) -> std::optional<double> {
            // pieces meeting the open interval (a, b)
            const auto first = std::upper_bound(pw.breaks.begin(), pw.breaks.end(), a);
            const auto last = std::lower_bound(pw.breaks.begin(), pw.breaks.end(), b);
            const auto i0 = static_cast<std::size_t>(first - pw.breaks.begin());
            const auto i1 = static_cast<std::size_t>(last - pw.breaks.begin());
            for (std::size_t i = i0 + 1; i <= i1; ++i)
              if (pw.values[i] != pw.values[i0]) return std::nullopt;
            return pw.values[i0];
          },
          [](const detail::SmoothExp& s) -> std::optional<double> {
            if (s.amplitude == 0.0) return s.base;
            return std::nullopt;
          },
          [](const detail::CustomExp&) -> std::optional<double> { return std::nullopt; },
          [a, b](const detail::ConjugateExp& c) -> std::optional<double> {
            if (auto v = c.inner.constant_on(a, b)) return conj(*v);
            return std::nullopt;
          },
          [a, b](const detail::ScaledExp& s) -> std::optional<double> {
            if (auto v = s.inner.constant_on(a, b)) return s.factor * *v;
            return std::nullopt;
          },
      },
      node_->body);
}

bool Exponent::is_in_P(double margin) const {
  return node_->p_minus > 1.0 + margin && std::isfinite(node_->p_plus);
}

std::string Exponent::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(overloaded{
                 [&](const detail::ConstantExp& c) { os << "const(" << c.p << ")"; },
                 [&](const detail::PiecewiseExp& pw) {
                   os << "piecewise(breaks=[";
                   for (std::size_t i = 0; i < pw.breaks.size(); ++i)
                     os << (i ? "," : "") << pw.breaks[i];
                   os << "],values=[";
                   for (std::size_t i = 0; i < pw.values.size(); ++i)
                     os << (i ? "," : "") << pw.values[i];
                   os << "])";
                 },
                 [&](const detail::SmoothExp& s) {
                   os << "smooth(" << to_string(s.formula) << ",base=" << s.base
                      << ",amp=" << s.amplitude << ")";
                 },
                 [&](const detail::CustomExp&) { os << "custom"; },
                 [&](const detail::ConjugateExp& c) { os << "conj(" << c.inner.describe() << ")"; },
                 [&](const detail::ScaledExp& s) {
                   os << s.factor << "*" << s.inner.describe();
                 },
             },
             node_->body);
  return os.str();
}

std::span<const double> Exponent::piecewise_breaks() const {
  if (const auto* pw = std::get_if<detail::PiecewiseExp>(&node_->body)) return pw->breaks;
  return {};
}

std::span<const double> Exponent::piecewise_values() const {
  if (const auto* pw = std::get_if<detail::PiecewiseExp>(&node_->body)) return pw->values;
  return {};
}

std::optional<SmoothFormula> Exponent::smooth_formula() const {
  if (const auto* s = std::get_if<detail::SmoothExp>(&node_->body)) return s->formula;
  if (const auto* c = std::get_if<detail::ConjugateExp>(&node_->body)) return c->inner.smooth_formula();
  if (const auto* s = std::get_if<detail::ScaledExp>(&node_->body)) return s->inner.smooth_formula();
  return std::nullopt;
}

double Exponent::smooth_base() const {
  if (const auto* s = std::get_if<detail::SmoothExp>(&node_->body)) return s->base;
  if (const auto* c = std::get_if<detail::ConjugateExp>(&node_->body)) return c->inner.smooth_base();
  if (const auto* s = std::get_if<detail::ScaledExp>(&node_->body)) return s->inner.smooth_base();
  return 0.0;
}

double Exponent::smooth_amplitude() const {
  if (const auto* s = std::get_if<detail::SmoothExp>(&node_->body)) return s->amplitude;
  if (const auto* c = std::get_if<detail::ConjugateExp>(&node_->body))
    return c->inner.smooth_amplitude();
  if (const auto* s = std::get_if<detail::ScaledExp>(&node_->body))
    return s->inner.smooth_amplitude();
  return 0.0;
}

bool Exponent::is_conjugated() const {
  if (std::holds_alternative<detail::ConjugateExp>(node_->body)) return true;
  if (const auto* s = std::get_if<detail::ScaledExp>(&node_->body)) return s->inner.is_conjugated();
  return false;
}

double Exponent::scale_factor() const {
  if (const auto* s = std::get_if<detail::ScaledExp>(&node_->body)) return s->factor;
  return 1.0;
}

CheckReport log_holder_check(const Exponent& e, const LogHolderOptions& opts) {
  if (!e.is_in_P()) throw InvalidInput("log_holder_check needs an exponent in P");
  if (opts.sample_budget < 2 || opts.decay_window_log2 < 4 || opts.finest_scale_log2 < 4)
    throw InvalidInput("log_holder_check sample parameters too small");
  const bool radial = e.dimension() >= 2;

  std::vector<double> xs;
  xs.push_back(0.0);
  for (int i = 0; i < opts.sample_budget; ++i) {
    const double x = -4.0 + 8.0 * i / (opts.sample_budget - 1);
    if (!radial || x >= 0.0) xs.push_back(x);
  }
  for (int i = -160; i <= 4 * opts.decay_window_log2; ++i) {
    const double r = std::exp2(i / 4.0);
    xs.push_back(r);
    if (!radial) xs.push_back(-r);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto p = [&](double x) {
    const double v = e(x);
    if (!std::isfinite(v)) throw InvalidInput("exponent not evaluable at a sample point");
    return v;
  };

  // Local constant per scale h = 2^-m: sup |p(x) - p(x+h)| log(1/h).
  std::vector<double> scales, local;
  const double local_window = 64.0;
  for (int m = 1; m <= opts.finest_scale_log2; ++m) {
    const double h = std::ldexp(1.0, -m);
    double best = 0.0;
    for (double x : xs) {
      if (std::abs(x) > local_window) continue;
      best = std::max(best, std::abs(p(x) - p(x + h)));
    }
    for (double b : e.breakpoints()) {
      const double x = b - 0.5 * h;
      if (radial && x < 0.0) continue;
      best = std::max(best, std::abs(p(x) - p(x + h)));
    }
    scales.push_back(m);
    local.push_back(best * std::log(1.0 / h));
  }
  const double local_const = *std::max_element(local.begin(), local.end());
  const std::size_t half_m = local.size() / 2;
  const LineFit local_fit = fit_line(std::span(scales).subspan(half_m),
                                     std::span(local).subspan(half_m));

  // Decay constant per window R = 2^j: sup_{|x|<=R} |p(x) - p_inf(R)| log(e + |x|).
  std::vector<double> windows, decay;
  double p_inf = 0.0;
  for (int j = 1; j <= opts.decay_window_log2; ++j) {
    const double R = std::ldexp(1.0, j);
    p_inf = radial ? p(R) : 0.5 * (p(R) + p(-R));
    double best = 0.0;
    for (double x : xs) {
      if (std::abs(x) > R) continue;
      best = std::max(best, std::abs(p(x) - p_inf) * std::log(std::numbers::e + std::abs(x)));
    }
    windows.push_back(j);
    decay.push_back(best);
  }
  const double decay_const = decay.back();
  const std::size_t half_j = decay.size() / 2;
  const LineFit decay_fit = fit_line(std::span(windows).subspan(half_j),
                                     std::span(decay).subspan(half_j));

  CheckReport rep;
  rep.statement_id = "log-holder";
  rep.empirical_constant = std::max(local_const, decay_const);
  rep.fitted_exponent = p_inf;
  rep.witnesses.push_back({"local constant (sup over |x-y|<=1/2)", local_const, opts.cap});
  rep.witnesses.push_back({"local growth per halving of |x-y|", local_fit.slope, opts.growth_tol});
  rep.witnesses.push_back({"decay constant (window 2^" + std::to_string(opts.decay_window_log2) + ")",
                           decay_const, opts.cap});
  rep.witnesses.push_back({"decay growth per doubling of window", decay_fit.slope, opts.growth_tol});
  const bool local_ok = local_const <= opts.cap && local_fit.slope <= opts.growth_tol;
  const bool decay_ok = decay_const <= opts.cap && decay_fit.slope <= opts.growth_tol;
  rep.pass = local_ok && decay_ok;
  std::ostringstream notes;
  notes << e.describe() << "; fitted p_inf = " << p_inf;
  if (!local_ok) notes << "; local constant grows at small scales";
  if (!decay_ok) notes << "; decay constant grows with the window (no limit at infinity)";
  rep.notes = notes.str();
  return rep;
}

}  // namespace cbmo
