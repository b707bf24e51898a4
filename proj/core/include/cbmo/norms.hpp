#pragma once

#include <span>
#include <vector>

#include "cbmo/exponent.hpp"
#include "cbmo/func.hpp"
#include "cbmo/quadrature.hpp"

namespace cbmo {

/// Region a modular or norm is taken over: an origin-centred ball, an
/// annulus (dyadic rings included) or the whole space.
struct Domain {
  enum class Kind { ball, annulus, full };

  Kind kind = Kind::full;
  double r_in = 0.0;
  double r_out = 0.0;
  int dim = 1;

  static Domain ball(double r, int dim = 1);
  static Domain annulus(double r_in, double r_out, int dim = 1);
  static Domain ring(int k, int dim = 1);
  static Domain full(int dim = 1);

  /// Lebesgue measure; +inf for the whole space.
  double measure() const;
  /// chi of the domain (the constant 1 for the whole space).
  Func indicator() const;
};

struct NormOptions {
  QuadOptions quad;
  /// Bisection stops once hi - lo <= max(width_abs, width_rel * hi) ...
  double width_rel = 1e-8;
  double width_abs = 1e-10;
  /// ... or once |rho(f / lambda) - 1| <= modular_tol.
  double modular_tol = 1e-10;
  /// f is treated as zero when the modular at lambda = 1 and at
  /// lambda = zero_probe_scale both stay below this.
  double zero_threshold = 1e-14;
  double zero_probe_scale = 1e-12;
  int max_expansions = 200;
  int max_bisections = 200;
};

struct NormResult {
  double value = 0.0;
  double abs_error_bound = 0.0;
  int bisection_iters = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// rho(f) = \int_domain |f(x)|^{p(x)} dx.
QuadResult modular(const Func& f, const Exponent& e, const Domain& domain,
                   const QuadOptions& opts = {});

/// rho(f / lambda).
QuadResult scaled_modular(const Func& f, const Exponent& e, const Domain& domain, double lambda,
                          const QuadOptions& opts = {});

/// Luxemburg norm inf{lambda > 0 : rho(f chi_domain / lambda) <= 1}, by
/// bracketing and bisection on the decreasing map lambda -> rho(f / lambda).
/// Throws NotInSpace when the modular stays infinite.
NormResult luxemburg_norm(const Func& f, const Exponent& e, const Domain& domain,
                          const NormOptions& opts = {});

/// ||chi_domain||_{L^{p(.)}}; closed form |D|^{1/p} when p is constant on D.
NormResult chi_norm(const Domain& domain, const Exponent& e, const NormOptions& opts = {});

/// r_p = 1 + 1/p_- + 1/p_+.
double duality_constant(const Exponent& e);

struct DualBracket {
  double lower = 0.0;  // best |\int f g| / ||g||_{p'} over the bank
  double upper = 0.0;  // r_p ||f||
  double norm = 0.0;   // ||f||_{p(.)}
  double r_p = 0.0;
  int best_index = -1;
};

/// Brackets sup{|\int f g| : ||g||_{p'} <= 1} between a bank maximum and
/// r_p ||f||. Throws InvalidInput on an empty bank.
DualBracket dual_pairing_sup(const Func& f, const Exponent& e, std::span<const Func> dual_bank,
                             const NormOptions& opts = {});

/// Normalizable catalog atoms plus the extremizer sgn(f) |f / ||f|| |^{p - 1}.
std::vector<Func> default_dual_bank(const Func& f, const Exponent& e,
                                    const NormOptions& opts = {});

}  // namespace cbmo
