#include "cbmo/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "cbmo/errors.hpp"

namespace cbmo {

namespace {

// Kronrod abscissae on [-1, 1] (positive half, descending) and weights.
// Every odd-indexed abscissa (1, 3, 5) and the centre are shared with the
// 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// A piece of the (possibly transformed) integration variable.
struct Piece {
  double a;
  double b;
  double value;
  double error;
  bool final;  // too narrow to split further
};


// The integrand in the variable actually fed to the rule.
struct Transformed {
  const Integrand* g;
  enum class Map { identity, upper_tail, lower_tail } map = Map::identity;
  double anchor = 0.0;
  double scale = 1.0;

  double operator()(double t) const {
    switch (map) {
      case Map::identity:
        return (*g)(t);
      case Map::upper_tail: {
        const double x = anchor + scale * (1.0 - t) / t;
        return (*g)(x) * scale / (t * t);
      }
      case Map::lower_tail: {
        const double x = anchor - scale * (1.0 - t) / t;
        return (*g)(x) * scale / (t * t);
      }
    }
    return 0.0;
  }
};

Piece gauss_kronrod(const Transformed& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  Piece p{a, b, kronrod, std::abs(kronrod - gauss), false};
  if (!std::isfinite(p.value) || !std::isfinite(p.error)) {
    std::ostringstream os;
    os << "integrand not finite on [" << a << ", " << b << "]";
    throw NonConvergence(os.str(), std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::infinity());
  }
  return p;
}

bool too_narrow(double a, double b) {
  const double mid = 0.5 * (a + b);
  if (!(mid > a && mid < b)) return true;
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return (b - a) <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

struct Segment {
  Transformed f;
  double a;
  double b;
};

QuadResult integrate_segments(const std::vector<Segment>& segments, const QuadOptions& opts) {
  struct QPiece {
    Piece p;
    std::size_t seg;
  };
  // Largest error first; ties broken by position so the trajectory is
  // deterministic and independent of the tolerance.
  struct QOrder {
    bool operator()(const QPiece& l, const QPiece& r) const {
      if (l.p.error != r.p.error) return l.p.error < r.p.error;
      if (l.seg != r.seg) return l.seg > r.seg;
      return l.p.a > r.p.a;
    }
  };
  std::priority_queue<QPiece, std::vector<QPiece>, QOrder> pq;
  std::vector<Piece> done;

  double total = 0.0;
  double err = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    if (!(seg.b > seg.a)) continue;
    Piece p = gauss_kronrod(seg.f, seg.a, seg.b);
    total += p.value;
    err += p.error;
    pq.push({p, s});
  }

  auto exact_sums = [&](double& t, double& e) {
    t = 0.0;
    e = 0.0;
    auto copy = pq;
    while (!copy.empty()) {
      t += copy.top().p.value;
      e += copy.top().p.error;
      copy.pop();
    }
    for (const auto& d : done) {
      t += d.value;
      e += d.error;
    }
  };

  int subdivisions = 0;
  for (;;) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (err <= target || pq.empty()) {
      exact_sums(total, err);
      const double exact_target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
      if (err <= exact_target) break;
      if (pq.empty()) {
        throw NonConvergence("quadrature hit the roundoff floor before reaching tolerance",
                             total, err);
      }
    }
    if (subdivisions >= opts.max_subdivisions) {
      exact_sums(total, err);
      throw NonConvergence("quadrature subdivision budget exhausted", total, err);
    }
    QPiece top = pq.top();
    pq.pop();
    if (too_narrow(top.p.a, top.p.b)) {
      top.p.final = true;
      done.push_back(top.p);
      continue;
    }
    const auto& seg = segments[top.seg];
    const double mid = 0.5 * (top.p.a + top.p.b);
    Piece left = gauss_kronrod(seg.f, top.p.a, mid);
    Piece right = gauss_kronrod(seg.f, mid, top.p.b);
    total += left.value + right.value - top.p.value;
    err += left.error + right.error - top.p.error;
    pq.push({left, top.seg});
    pq.push({right, top.seg});
    ++subdivisions;
  }
  return {total, err, subdivisions};
}

// Adds the pieces of [a, b] split at every breakpoint strictly inside it.
void add_range(std::vector<Segment>& out, const Integrand& g, double a, double b,
               std::span<const double> breakpoints) {
  if (!(b > a)) return;
  std::vector<double> cuts;
  for (double p : breakpoints)
    if (p > a && p < b && std::isfinite(p)) cuts.push_back(p);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> knots;
  knots.push_back(a);
  knots.insert(knots.end(), cuts.begin(), cuts.end());
  knots.push_back(b);

  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i], hi = knots[i + 1];
    Transformed f{&g};
    if (std::isinf(lo) && std::isinf(hi)) {
      // only possible without cuts: split at the origin
      add_range(out, g, lo, 0.0, {});
      add_range(out, g, 0.0, hi, {});
      continue;
    }
    if (std::isinf(hi)) {
      f.map = Transformed::Map::upper_tail;
      f.anchor = lo;
      f.scale = std::max(1.0, std::abs(lo));
      out.push_back({f, 0.0, 1.0});
    } else if (std::isinf(lo)) {
      f.map = Transformed::Map::lower_tail;
      f.anchor = hi;
      f.scale = std::max(1.0, std::abs(hi));
      out.push_back({f, 0.0, 1.0});
    } else {
      out.push_back({f, lo, hi});
    }
  }
}

void check_opts(const QuadOptions& opts) {
  if (!(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0))
    throw InvalidInput("quadrature needs a positive tolerance");
  if (opts.max_subdivisions < 0) throw InvalidInput("negative subdivision budget");
}

std::vector<double> radial_breakpoints(std::span<const double> bps) {
  std::vector<double> out;
  for (double b : bps) out.push_back(std::abs(b));
  return out;
}

}  // namespace

QuadResult integrate_interval(const Integrand& g, double a, double b,
                              std::span<const double> breakpoints, const QuadOptions& opts) {
  check_opts(opts);
  if (std::isnan(a) || std::isnan(b)) throw InvalidInput("integration limit is NaN");
  if (a > b) throw InvalidInput("integrate_interval requires a <= b");
  if (a == b) return {};
  std::vector<Segment> segs;
  add_range(segs, g, a, b, breakpoints);
  return integrate_segments(segs, opts);
}

QuadResult integrate_annulus(const Integrand& g, const Annulus& annulus,
                             std::span<const double> breakpoints, Symmetry symmetry,
                             const QuadOptions& opts) {
  check_opts(opts);
  if (annulus.dim < 1) throw InvalidInput("dimension must be >= 1");
  if (!(annulus.r_in >= 0.0) || annulus.r_out < annulus.r_in)
    throw InvalidInput("annulus radii must satisfy 0 <= r_in <= r_out");
  if (annulus.r_out == annulus.r_in) return {};
  std::vector<Segment> segs;
  if (annulus.dim == 1) {
    std::vector<double> bps(breakpoints.begin(), breakpoints.end());
    bps.push_back(0.0);
    add_range(segs, g, -annulus.r_out, -annulus.r_in, bps);
    add_range(segs, g, annulus.r_in, annulus.r_out, bps);
    return integrate_segments(segs, opts);
  }
  if (symmetry != Symmetry::radial)
    throw InvalidInput("integrals in dimension >= 2 require a radial integrand");
  const int n = annulus.dim;
  const double surface = n * unit_ball_volume(n);
  const Integrand radial = [&g, n, surface](double rho) {
    return surface * std::pow(rho, n - 1) * g(rho);
  };
  const auto bps = radial_breakpoints(breakpoints);
  add_range(segs, radial, annulus.r_in, annulus.r_out, bps);
  return integrate_segments(segs, opts);
}

QuadResult integrate_ball(const Integrand& g, const Ball& ball, std::span<const double> breakpoints,
                          Symmetry symmetry, const QuadOptions& opts) {
  if (!(ball.radius >= 0.0)) throw InvalidInput("ball radius must be non-negative");
  return integrate_annulus(g, Annulus{0.0, ball.radius, ball.dim}, breakpoints, symmetry, opts);
}

QuadResult integrate_dyadic_ring(const Integrand& g, int k, int dim,
                                 std::span<const double> breakpoints, Symmetry symmetry,
                                 const QuadOptions& opts) {
  return integrate_annulus(g, Annulus::dyadic_ring(k, dim), breakpoints, symmetry, opts);
}

}  // namespace cbmo
