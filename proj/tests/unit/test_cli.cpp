#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cbmo_cli/cli.hpp"
#include "cbmo_cli/config.hpp"
#include "cbmo_cli/report_io.hpp"

using namespace cbmo;
using namespace cbmo::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
  const char* dir = std::getenv("CBMO_TEST_TMP");
  return (std::filesystem::path(dir ? dir : std::filesystem::temp_directory_path().string()) / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

const char* kSample = R"({
  "exponents": {
    "bump": {"kind": "piecewise", "breaks": [-1.0, 1.0], "values": [3.0, 2.0, 3.0]},
    "p3": {"kind": "constant", "p": 3.0},
    "soft": {"kind": "smooth", "formula_id": "inv_one_plus_sq", "params": {"base": 2.0, "amplitude": 0.5}}
  },
  "functions": {
    "mix": {"kind": "linear_combination", "terms": [
      {"coef": 1.0, "f": {"kind": "chi_interval", "a": 0.0, "b": 1.0}},
      {"coef": -0.5, "f": "sgn_chi_B1"}]},
    "odd_ring": {"kind": "product_with_sign", "f": {"kind": "chi_ring", "k": 2}},
    "steps": {"kind": "dyadic_step", "k_max": 12},
    "wrapped": {"kind": "abs", "f": "mix"}
  },
  "grids": {
    "radius": [0.5, 1.0, 2.0, 4.0],
    "dyadic_range": {"k_min": -30, "k_max": 10},
    "p0_grid": [1.25],
    "q_grid": [0.5, 1.0],
    "r": 2.0,
    "alpha": 0.0
  },
  "tolerances": {
    "lemma5.1": {"abs_tol": 1e-07, "rel_tol": 1e-06, "slope_tol": 0.05}
  },
  "statements": ["lemma2.3"],
  "outputs": {"json": "out.json"},
  "seed": 11
})";

}  // namespace

TEST_CASE("config round-trip") {
  const auto c = parse_config(kSample);
  CHECK(c.exponents.size() == 3);
  CHECK(c.functions.size() == 4);
  CHECK(c.seed == 11u);
  const std::string text = serialize_config(c);
  const auto again = parse_config(text);
  CHECK(again == c);
  CHECK(serialize_config(again) == text);
  CHECK(parse_config("{}") == ExperimentConfig{});
  CHECK(resolve_function(c, "wrapped")(0.5) == doctest::Approx(0.5));
  CHECK(resolve_function(c, "wrapped")(-0.5) == doctest::Approx(0.5));
  CHECK(resolve_exponent(c, "soft")(0.0) == doctest::Approx(2.5));
  CHECK(resolve_exponent(c, "const2")(0.0) == 2.0);
}

TEST_CASE("config errors name the offending field") {
  auto field_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<no error>");
  };
  CHECK(field_of("{not json") == "<root>");
  CHECK(field_of(R"({"functions": {"f": {"kind": "nosuch"}}})") == "functions.f.kind");
  CHECK(field_of(R"({"exponents": {"e": {"kind": "constant"}}})") == "exponents.e.p");
  CHECK(field_of(R"({"exponents": {"e": {"kind": "piecewise", "breaks": [1, 0], "values": [2, 3, 2]}}})") == "exponents.e");
  CHECK(field_of(R"({"grids": {"radius": [1.0, -2.0]}})") == "grids.radius[1]");
  CHECK(field_of(R"({"grids": {"dyadic_range": {"k_min": 5, "k_max": 1}}})") == "grids.dyadic_range");
  CHECK(field_of(R"({"grids": {"delta_grid": [0.5, 1.5]}})") == "grids.delta_grid[1]");
  CHECK(field_of(R"({"grids": {"p0_grid": [1.0]}})") == "grids.p0_grid[0]");
  CHECK(field_of(R"({"tolerances": {"nosuch": {}}})") == "tolerances.nosuch");
  CHECK(field_of(R"({"functions": {"a": "b", "b": "a"}})").rfind("functions.", 0) == 0);
  CHECK(field_of(R"({"functions": {"a": "missing"}})") == "functions.a");
  CHECK(field_of(R"({"functions": {"f": {"kind": "chi_ring", "k": 1.5}}})") == "functions.f.k");
  CHECK(field_of(R"({"bogus": 1})") == "bogus");
  CHECK(field_of(R"({"seed": -3})") == "seed");
  CHECK(field_of(R"({"statements": ["lemma9"]})") == "statements[0]");
}

TEST_CASE("norm subcommand") {
  auto r = invoke({"norm", "--f", "chi01", "--p", "const2"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("value 1.0\n") != std::string::npos);
  CHECK(r.out.find("tolerances quad_abs=") != std::string::npos);
  r = invoke({"norm", "--f", "chi02", "--p", "pw23"});
  CHECK(r.code == exit_ok);
  r = invoke({"norm", "--f", "one", "--p", "const2", "--domain", "ball:2", "--tol", "1e-10"});
  CHECK(r.out.find("value 2.0") != std::string::npos);
  CHECK(r.out.find("quad_abs=1e-10") != std::string::npos);
  r = invoke({"norm", "--f", "nosuch", "--p", "const2"});
  CHECK(r.code == exit_usage);
  CHECK(r.err.find("unknown function 'nosuch'") != std::string::npos);
  CHECK(invoke({"norm", "--f", "chi01", "--p", "const2", "--domain", "disk:3"}).code == exit_usage);
  CHECK(invoke({"norm", "--p", "const2"}).code == exit_usage);
  CHECK(invoke({"norm", "--f", "one", "--p", "const2"}).code == exit_usage);  // not in L^2(R)
}

TEST_CASE("norm with a config") {
  const std::string path = tmp("cli_config.json");
  spit(path, kSample);
  const std::string json = tmp("cli_norm.json");
  auto r = invoke({"norm", "--config", path, "--f", "odd_ring", "--p", "p3", "--json", json});
  CHECK(r.code == exit_ok);
  const auto j = nlohmann::json::parse(slurp(json));
  CHECK(j["value"].get<double>() == doctest::Approx(std::cbrt(4.0)).epsilon(1e-8));
  CHECK(j.contains("tolerances"));
  spit(path, R"({"grids": {"radius": "wide"}})");
  r = invoke({"norm", "--config", path, "--f", "chi01", "--p", "const2"});
  CHECK(r.code == exit_usage);
  CHECK(r.err.find("grids.radius") != std::string::npos);
}

TEST_CASE("operator, cbmo and herz subcommands") {
  auto r = invoke({"op", "--op", "hardy", "--f", "chi_B1", "--x", "0.5,4"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("2.0") != std::string::npos);
  CHECK(invoke({"op", "--op", "commutator_hardy", "--f", "chi_B1"}).code == exit_usage);
  CHECK(invoke({"op", "--op", "nosuch", "--f", "chi_B1"}).code == exit_usage);
  const std::string csv = tmp("cli_op.csv");
  r = invoke({"op", "--op", "commutator_dual_hardy", "--f", "chi_B1", "--b", "sgn", "--x", "0.25", "--csv", csv});
  CHECK(r.code == exit_ok);
  CHECK(slurp(csv).rfind("x,value,abs_error_bound\n0.25,", 0) == 0);
  CHECK(invoke({"op", "--op", "maximal", "--f", "chi01", "--x", "2"}).out.find("0.25") != std::string::npos);

  r = invoke({"cbmo", "--f", "sgn", "--p", "const2", "--kmin", "-2", "--kmax", "4"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("value 1.0") != std::string::npos);
  CHECK(r.out.find("diverges no") != std::string::npos);
  const std::string bcsv = tmp("cli_cbmo.csv");
  r = invoke({"cbmo", "--f", "dyadic_step", "--variant", "classical", "--q", "1", "--csv", bcsv});
  CHECK(r.code == exit_ok);
  CHECK(slurp(bcsv).rfind("radius,contribution\n", 0) == 0);

  r = invoke({"herz", "--f", "chi_C0", "--p", "const2", "--q", "2"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("value 1.0") != std::string::npos);
  CHECK(invoke({"herz", "--f", "chi_B1", "--kmin", "-2", "--kmax", "2"}).code == exit_usage);
}

TEST_CASE("verify exit codes") {
  auto r = invoke({"verify", "--statement", "nosuch"});
  CHECK(r.code == exit_usage);
  CHECK(invoke({"verify"}).code == exit_usage);
  CHECK(invoke({"verify", "--all", "--statement", "lemma2.3"}).code == exit_usage);
  CHECK(invoke({"bogus"}).code == exit_usage);
  CHECK(invoke({}).code == exit_usage);
  CHECK(invoke({"--help"}).code == exit_ok);

  const std::string json = tmp("cli_prop31.json");
  r = invoke({"verify", "--statement", "prop3.1", "--p0", "2", "--json", json});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("prop3.1") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(json));
  REQUIRE(j.size() == 1);
  CHECK(j[0]["fitted_exponent"].get<double>() == doctest::Approx(0.5).epsilon(0.1));

  // An impossible tolerance turns a pass into exit code 2.
  const std::string cfg = tmp("cli_strict.json");
  spit(cfg, R"({"tolerances": {"thm4.1-converse-identity": {"abs_tol": 0.0}}})");
  CHECK(invoke({"verify", "--statement", "thm4.1-converse-identity", "--config", cfg}).code == exit_check_failed);
}

TEST_CASE("verify JSON schema, tolerance record and determinism") {
  const std::string a = tmp("cli_det_a.json"), b = tmp("cli_det_b.json"), c = tmp("cli_det.csv");
  auto r = invoke({"verify", "--statement", "lemma5.1", "--statement", "lemma2.3", "--seed", "3", "--tol", "1e-7",
                "--json", a, "--csv", c});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("tolerance override abs=1e-07") != std::string::npos);
  invoke({"verify", "--statement", "lemma2.3", "--statement", "lemma5.1", "--seed", "3", "--tol", "1e-7", "--json", b});
  CHECK(slurp(a) == slurp(b));
  const auto j = nlohmann::ordered_json::parse(slurp(a));
  REQUIRE(j.size() == 2);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j[0].items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"statement_id", "pass", "empirical_constant", "fitted_exponent", "witnesses",
                                         "notes"});
  std::vector<std::string> wkeys;
  for (const auto& [k, _] : j[0]["witnesses"][0].items()) wkeys.push_back(k);
  CHECK(wkeys == std::vector<std::string>{"input", "lhs", "rhs"});
  CHECK(j[1]["notes"].get<std::string>().find("abs=1e-07") != std::string::npos);
  CHECK(slurp(c).rfind("statement_id,pass,input,lhs,rhs\n", 0) == 0);

  r = invoke({"report", "--input", a});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("2/2 statements passed") != std::string::npos);
  CHECK(invoke({"report", "--input", tmp("does_not_exist.json")}).code == exit_usage);
}

TEST_CASE("report JSON round-trip") {
  std::vector<CheckReport> reps(2);
  reps[0].statement_id = "lemma2.3";
  reps[0].pass = true;
  reps[0].empirical_constant = 1.25;
  reps[0].witnesses = {{"a, \"quoted\"", 1.0, std::numeric_limits<double>::infinity()}};
  reps[0].notes = "n";
  reps[1].statement_id = "thm5.1";
  reps[1].fitted_exponent = -0.1;
  const auto text = reports_to_json(reps);
  const auto back = reports_from_json(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].witnesses == reps[0].witnesses);
  CHECK(back[0].empirical_constant == reps[0].empirical_constant);
  CHECK_FALSE(back[1].empirical_constant.has_value());
  CHECK(back[1].fitted_exponent == reps[1].fitted_exponent);
  CHECK(reports_to_json(back) == text);
  CHECK(reports_to_csv(reps).find("\"a, \"\"quoted\"\"\"") != std::string::npos);
  CHECK_THROWS_AS(reports_from_json("[{\"pass\": true}]"), InvalidInput);
}
