#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbmo/errors.hpp"
#include "cbmo/exponent.hpp"
#include "cbmo/func.hpp"
#include "cbmo/harness.hpp"
#include "cbmo/verify.hpp"

namespace cbmo::cli {

/// Raised for malformed or inconsistent configs; field() is a dotted path
/// such as "functions.bump.terms[1].coef".
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExponentSpec {
  std::string kind;  // constant | piecewise | smooth
  double p = 2.0;
  std::vector<double> breaks;
  std::vector<double> values;
  std::string formula_id;
  double base = 2.0;
  double amplitude = 1.0;

  Exponent build() const;
  friend bool operator==(const ExponentSpec&, const ExponentSpec&) = default;
};

/// Function specification mirroring the catalog. Composite kinds nest:
/// linear_combination uses coefs/args, product_with_sign and abs use args[0],
/// ref names another function of the config or the built-in catalog.
struct FuncSpec {
  std::string kind;
  std::map<std::string, double> params;
  std::vector<double> coefs;
  std::vector<FuncSpec> args;
  std::string ref;

  friend bool operator==(const FuncSpec&, const FuncSpec&) = default;
};

struct DyadicRange {
  int k_min = -20;
  int k_max = 20;
  friend bool operator==(const DyadicRange&, const DyadicRange&) = default;
};

struct GridSpec {
  std::optional<std::vector<double>> radius;
  std::optional<DyadicRange> dyadic_range;
  std::optional<std::vector<double>> p0_grid;
  std::optional<std::vector<double>> counterexample_p0;
  std::optional<std::vector<double>> delta_grid;
  std::optional<std::vector<double>> q_grid;       // Herz
  std::optional<std::vector<double>> cbmo_q_grid;  // CBMO^q embedding
  std::optional<std::vector<double>> r_grid;       // Minkowski
  std::optional<double> r;                         // Herz aggregation
  std::optional<double> alpha;
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct OutputSpec {
  std::optional<std::string> json;
  std::optional<std::string> csv;
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
  std::map<std::string, ExponentSpec> exponents;
  std::map<std::string, FuncSpec> functions;
  GridSpec grids;
  std::map<std::string, StatementTolerance> tolerances;
  std::optional<std::vector<std::string>> statements;
  OutputSpec outputs;
  std::optional<std::uint64_t> seed;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Functions and exponents available by name without a config.
const std::map<std::string, FuncSpec>& builtin_functions();
std::vector<std::string> builtin_exponent_names();

/// Resolves a name against the config first, then the built-ins.
Func resolve_function(const ExperimentConfig& config, const std::string& name);
Exponent resolve_exponent(const ExperimentConfig& config, const std::string& name);
Func build_function(const ExperimentConfig& config, const FuncSpec& spec);

/// Default verification inputs with the config's grids and tolerances applied.
HarnessConfig harness_config(const ExperimentConfig& config);

}  // namespace cbmo::cli
