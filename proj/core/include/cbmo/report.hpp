#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cbmo {

/// One concrete instance of an inequality: what was fed in, and both sides.
struct Witness {
  std::string input;
  double lhs = 0.0;
  double rhs = 0.0;

  friend bool operator==(const Witness&, const Witness&) = default;
};

/// Structured outcome of verifying one quantitative statement.
struct CheckReport {
  std::string statement_id;
  bool pass = false;
  std::optional<double> empirical_constant;
  std::optional<double> fitted_exponent;
  std::vector<Witness> witnesses;
  std::string notes;
};

}  // namespace cbmo
