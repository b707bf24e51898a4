#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cbmo/exponent.hpp"
#include "cbmo/func.hpp"
#include "cbmo/norms.hpp"

namespace cbmo {

/// One term of a supremum or sum: the radius (CBMO) or ring index k (Herz)
/// and what it contributed.
struct ScaleEntry {
  double scale = 0.0;
  double contribution = 0.0;
};

struct DivergenceFit {
  double slope = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

struct SpaceNormResult {
  /// Max (CBMO) or l^q sum (Herz) of the breakdown.
  double value = 0.0;
  /// Set when the ratio is still growing at the grid edge.
  bool diverges = false;
  std::vector<ScaleEntry> breakdown;
  /// Log-log fit over the last decade of radii (CBMO only).
  std::optional<DivergenceFit> divergence_fit;
  /// Herz: upper bound on what the rings outside k_range add to value.
  double tail_bound = 0.0;
  double abs_error_bound = 0.0;
  /// cbmo_inf_norm: the minimizing constant per ball.
  std::vector<double> centers;
};

struct SpaceOptions {
  NormOptions norm;
  /// Divergence verdict: last-decade slope above this with a good fit.
  double divergence_slope = 0.05;
  double divergence_min_r2 = 0.9;
  /// Golden-section stop: bracket width <= center_tol (1 + |c|).
  double center_tol = 1e-8;
  /// Herz: the truncated tail must stay below tail_rel_tol * max(value, 1).
  double tail_rel_tol = 0.05;
  /// Herz: rings scanned beyond k_range when bounding the tail.
  int tail_rings = 400;
  /// Worker threads for per-ball / per-ring work (1 = serial).
  int threads = 1;
};

/// Radii 2^k for k = k_min..k_max.
std::vector<double> dyadic_radius_grid(int k_min = -10, int k_max = 20);

/// sup_r ||(f - f_B) chi_B||_{p(.)} / ||chi_B||_{p(.)} over B = B(0, r), r in the grid.
SpaceNormResult cbmo_var_norm(const Func& f, const Exponent& e, std::span<const double> radius_grid = {},
                              const SpaceOptions& opts = {});

/// sup_r ( |B|^{-1} \int_B |f - f_B|^p )^{1/p}, 1 <= p < inf.
SpaceNormResult cbmo_classical_norm(const Func& f, double p, int dim = 1,
                                    std::span<const double> radius_grid = {},
                                    const SpaceOptions& opts = {});

/// How cbmo_star_norm picks the constant c_B subtracted on each ball.
struct CenterRule {
  enum class Kind { ball_average, per_ball_list, constant };
  Kind kind = Kind::ball_average;
  std::vector<double> centers;  // per_ball_list: one per grid radius
  double value = 0.0;           // constant

  static CenterRule ball_average() { return {}; }
  static CenterRule per_ball(std::vector<double> cs) { return {Kind::per_ball_list, std::move(cs), 0.0}; }
  static CenterRule fixed(double c) { return {Kind::constant, {}, c}; }
};

/// sup_r ||(f - c_B) chi_B|| / ||chi_B||.
SpaceNormResult cbmo_star_norm(const Func& f, const Exponent& e, const CenterRule& rule,
                               std::span<const double> radius_grid = {},
                               const SpaceOptions& opts = {});

/// sup_r inf_c ||(f - c) chi_B|| / ||chi_B||; c found by golden-section search
/// over the sampled range of f on B (f_B is always a candidate).
SpaceNormResult cbmo_inf_norm(const Func& f, const Exponent& e, std::span<const double> radius_grid = {},
                              const SpaceOptions& opts = {});

/// Ring norms ||f chi_k||_{p(.)} for k in [k_min, k_max], plus bounds on the
/// rings outside that range. Shared by every (alpha, q) aggregation.
struct HerzRings {
  int k_min = 0;
  int k_max = 0;
  std::vector<double> norms;
  std::vector<double> errors;
  /// Upper bounds for rings below k_min (index 0 is k_min - 1) and above
  /// k_max (index 0 is k_max + 1). Empty above means f vanishes there.
  std::vector<double> lower_tail;
  std::vector<double> upper_tail;
};

HerzRings herz_rings(const Func& f, const Exponent& e, int k_min = -20, int k_max = 20,
                     const SpaceOptions& opts = {});

/// How tail and error terms are combined with the kept sum.
enum class HerzBranch {
  automatic,   // q_triangle for q <= 1, minkowski otherwise
  q_triangle,  // |a + b|^q <= |a|^q + |b|^q, needs q <= 1
  minkowski,   // ||a + b||_q <= ||a||_q + ||b||_q, needs q >= 1
};

/// (sum_k (2^{alpha k} ||f chi_k||)^q)^{1/q} from precomputed rings, with the
/// tail and ring errors propagated by the chosen branch. Throws
/// NonConvergence when the tail is not small.
SpaceNormResult herz_aggregate(const HerzRings& rings, double alpha, double q,
                               const SpaceOptions& opts = {},
                               HerzBranch branch = HerzBranch::automatic);

SpaceNormResult herz_norm(const Func& f, const Exponent& e, double alpha, double q,
                          int k_min = -20, int k_max = 20, const SpaceOptions& opts = {});

/// herz_norm of the pointwise aggregate (sum_j |f_j|^r)^{1/r}, 1 < r < inf.
SpaceNormResult herz_norm_vector(std::span<const Func> fs, double r, const Exponent& e,
                                 double alpha, double q, int k_min = -20, int k_max = 20,
                                 const SpaceOptions& opts = {});

}  // namespace cbmo
