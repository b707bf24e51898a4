#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbmo/report.hpp"
#include "cbmo/verify.hpp"

namespace cbmo {

/// Every bank, grid and parameter the statement checks consume.
struct VerifyInputs {
  std::vector<NamedExponent> duality_exponents;
  std::vector<NamedFunc> duality_funcs;

  std::vector<NamedExponent> family_exponents;
  std::vector<CubeFamily> families;
  std::vector<double> delta_grid;

  std::vector<NamedExponent> ball_exponents;  // chi-product and subset checks
  std::vector<double> chi_radius_grid;
  std::vector<SubsetPair> subset_pairs;
  std::vector<double> p0_grid;

  std::vector<double> counterexample_p0;
  std::vector<NamedExponent> counterexample_exponents;
  int counterexample_k_max = 40;
  std::vector<double> cbmo_radius_grid;

  std::vector<NamedExponent> space_exponents;  // embedding and equivalences
  std::vector<NamedFunc> embedding_funcs;
  std::vector<double> q_grid;
  std::vector<NamedFunc> equivalence_funcs;
  std::vector<double> equivalence_radius_grid;

  std::vector<NamedFunc> identity_symbols;
  std::vector<double> identity_radii;
  int identity_points = 20;

  CommutatorBoundedInputs commutator;

  std::vector<std::vector<NamedFunc>> minkowski_lists;
  std::vector<double> minkowski_r_grid;

  VectorHerzInputs herz;

  /// Built-in banks; the randomized Minkowski lists depend on seed.
  static VerifyInputs defaults(std::uint64_t seed = 7);
};

/// Exponents used by the default banks, by name.
std::vector<NamedExponent> catalog_exponents();

struct HarnessConfig {
  /// Statements to run; empty means all of them.
  std::vector<std::string> statements;
  std::uint64_t seed = 7;
  TolerancePolicy tolerances = TolerancePolicy::defaults();
  /// Replaces the default inputs when set (seed is then ignored).
  std::optional<VerifyInputs> inputs;
  /// Concurrent statement jobs (0 = hardware concurrency).
  int jobs = 0;
};

/// Runs the selected checks concurrently and returns their reports in
/// canonical statement order. Unknown ids throw InvalidInput.
std::vector<CheckReport> run_harness(const HarnessConfig& config);

/// Fixed-width pass/fail table. Throws Error when require_all is set and
/// some statement id has no report.
std::string summary_table(const std::vector<CheckReport>& reports, bool require_all);

}  // namespace cbmo
