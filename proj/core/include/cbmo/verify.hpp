#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbmo/exponent.hpp"
#include "cbmo/func.hpp"
#include "cbmo/norms.hpp"
#include "cbmo/report.hpp"
#include "cbmo/spaces.hpp"

namespace cbmo {

/// Every statement the harness knows, in canonical report order.
const std::vector<std::string>& statement_ids();
bool is_statement_id(const std::string& id);

struct StatementTolerance {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  /// Trend threshold: last-decade log-log slope below this means bounded.
  double slope_tol = 0.05;
  friend bool operator==(const StatementTolerance&, const StatementTolerance&) = default;
};

/// The single place where each statement's pass thresholds live.
class TolerancePolicy {
 public:
  static TolerancePolicy defaults();

  /// Throws InvalidInput for an unknown statement id.
  const StatementTolerance& at(const std::string& id) const;
  void set(const std::string& id, const StatementTolerance& t);
  /// Replaces abs_tol for every statement.
  void override_abs(double tol);
  const std::map<std::string, StatementTolerance>& table() const { return table_; }

  /// Empirical constants above this count as unbounded.
  double bounded_cap = 1e6;
  /// A fit this good is required before a positive slope counts as divergence.
  double divergence_min_r2 = 0.9;

 private:
  std::map<std::string, StatementTolerance> table_;
};

struct NamedExponent {
  std::string name;
  Exponent exponent = Exponent::constant(2.0);
};

struct NamedFunc {
  std::string name;
  Func f = Func::zero();
};

/// A bank entry tagged with the length scale used for trend fits.
struct ScaledFunc {
  std::string name;
  Func f = Func::zero();
  double scale = 1.0;
};

/// duality bracket: lower <= r_p ||f|| and the bank ratio lower / ||f||
/// lands in [1 - rel_tol, r_p + rel_tol] (the extremizer is always in the bank).
CheckReport check_duality(std::span<const NamedExponent> exponents, std::span<const NamedFunc> funcs,
                          const StatementTolerance& tol, const NormOptions& opts = {});

/// Disjoint 1-D intervals with weights t_Q and the function whose averages
/// f_Q normalize the left-hand side.
struct CubeFamily {
  std::string name;
  std::vector<std::pair<double, double>> cubes;
  std::vector<double> weights;
  Func f;
};

/// Single-family weighted inequality: for each delta the worst ratio
/// ||sum t_Q |f / f_Q|^delta chi_Q|| / ||sum t_Q chi_Q|| over the families.
/// fitted_exponent is the delta with the smallest worst ratio.
CheckReport check_diening_single_family(std::span<const NamedExponent> exponents,
                                        std::span<const CubeFamily> families,
                                        std::span<const double> delta_grid,
                                        const StatementTolerance& tol, double cap,
                                        const NormOptions& opts = {});

/// sup_B ||chi_B||_p ||chi_B||_{p'} / |B| over origin balls. Constant
/// exponents must give 1 within abs_tol; every exponent needs a finite sup
/// with flat trends at both grid edges.
CheckReport check_chi_product(std::span<const NamedExponent> exponents,
                              std::span<const double> radius_grid, const StatementTolerance& tol,
                              double cap, const NormOptions& opts = {});

/// A ball B(0, R) and a measurable subset S of it.
struct SubsetPair {
  double ball_radius = 1.0;
  std::string subset_name;
  Func subset;  // chi_S
  double subset_measure = 0.0;
};

struct SubsetReports {
  CheckReport subset_powers;  // both ball/subset inequalities, delta fitted
  CheckReport p0_improvement; // the (|B| / |S|)^{1/p0} bound per p0
};

SubsetReports check_subset_ratios(std::span<const NamedExponent> exponents,
                                  std::span<const SubsetPair> pairs,
                                  std::span<const double> p0_grid,
                                  const StatementTolerance& tol_powers,
                                  const StatementTolerance& tol_p0, double cap,
                                  const NormOptions& opts = {});

/// The dyadic-step counterexample: bounded p = 1 mean oscillation, vanishing
/// ball means, and oscillation ratios growing like r^{1 - 1/p0}.
/// Variable exponents are swept as extra witnesses without affecting pass.
CheckReport check_counterexample(std::span<const double> p0_list,
                                 std::span<const NamedExponent> variable_exponents, int k_max,
                                 std::span<const double> radius_grid,
                                 const StatementTolerance& tol, double min_r2,
                                 const SpaceOptions& opts = {});

/// ||f||_{C^{p(.)}} / ||f||_{CBMO^q} for each q; pass iff finite for the
/// largest q on every f whose CBMO^q norm is itself bounded.
CheckReport check_embedding_cbmo_q(std::span<const NamedExponent> exponents,
                                   std::span<const double> q_grid,
                                   std::span<const NamedFunc> funcs,
                                   std::span<const double> radius_grid,
                                   const StatementTolerance& tol, double cap,
                                   const SpaceOptions& opts = {});

struct EquivalenceReports {
  CheckReport center_collection;  // sup with per-ball constants c_B
  CheckReport inf_center;         // sup of inf over c
};

/// Mean-centred, collection-centred and inf-centred oscillation norms; the
/// definitional inequalities are asserted and kappa = var / inf is reported.
EquivalenceReports check_norm_equivalences(std::span<const NamedExponent> exponents,
                                           std::span<const NamedFunc> funcs,
                                           std::span<const double> radius_grid,
                                           const StatementTolerance& tol_collection,
                                           const StatementTolerance& tol_inf, double cap,
                                           const SpaceOptions& opts = {});

/// b(x) - b_B = (|x|^n / |B|) [b, H]chi_B(x) + [b, H*]f_0(x) at the sample
/// points x = r (-0.975 + 0.1 i), i = 0..points-1, of every ball.
CheckReport check_commutator_identity(std::span<const NamedFunc> symbols,
                                      std::span<const double> radii, int points,
                                      const StatementTolerance& tol,
                                      const QuadOptions& opts = {});

struct CommutatorBoundedInputs {
  NamedFunc symbol;
  std::vector<NamedExponent> exponents;
  std::vector<ScaledFunc> bank;
  /// Symbol outside the oscillation space and the ball exponents m it is
  /// probed on with chi_{B(0, 2^m)} (constant exponent 2).
  std::optional<NamedFunc> divergent_symbol;
  std::vector<int> divergent_m;
};

/// Operator-norm lower bounds sup_f ||[b, T]f|| / ||f|| for T = H, H* on
/// L^{p(.)} and L^{p'(.)}. A bank can only exhibit counterexamples, so a
/// pass means none was found.
CheckReport check_commutator_bounded(const CommutatorBoundedInputs& in,
                                     const StatementTolerance& tol, double cap,
                                     const SpaceOptions& opts = {});

/// (sum_j (\int |f_j|)^r)^{1/r} <= \int (sum_j |f_j|^r)^{1/r}.
CheckReport check_minkowski(std::span<const std::vector<NamedFunc>> lists,
                            std::span<const double> r_grid, const StatementTolerance& tol,
                            const QuadOptions& opts = {});

/// Reproducible random finite lists of catalog functions.
std::vector<std::vector<NamedFunc>> random_function_lists(int count, std::uint64_t seed);

struct FuncSequence {
  std::string name;
  std::vector<Func> fs;
  double scale = 1.0;
};

struct VectorHerzInputs {
  NamedFunc symbol;
  NamedExponent exponent;
  double alpha = 0.0;
  std::vector<double> q_grid;
  double r = 2.0;
  std::vector<FuncSequence> sequences;
  int k_min = -40;
  int k_max = 60;
};

/// Vector-valued Herz ratios for [b, H] and [b, H*]; every q runs through
/// its own branch and q = 1 through both, which must agree.
CheckReport check_vv_herz(const VectorHerzInputs& in, const StatementTolerance& tol, double cap,
                          const SpaceOptions& opts = {});

}  // namespace cbmo
