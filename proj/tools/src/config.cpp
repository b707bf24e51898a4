#include "cbmo_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace cbmo::cli {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

ConfigError::ConfigError(std::string field, const std::string& message)
    : InvalidInput("config field '" + field + "': " + message), field_(std::move(field)) {}

namespace {

struct ParamSchema {
  std::vector<std::string> reals;
  std::vector<std::string> ints;
};

// Leaf kinds and their parameters, in serialization order.
const std::map<std::string, ParamSchema>& leaf_kinds() {
  static const std::map<std::string, ParamSchema> kinds{
      {"zero", {}},
      {"constant", {{"c"}, {}}},
      {"chi_interval", {{"a", "b"}, {}}},
      {"chi_annulus", {{"r_in", "r_out"}, {}}},
      {"chi_ball", {{"r"}, {}}},
      {"chi_ring", {{}, {"k"}}},
      {"power", {{"a"}, {}}},
      {"sign", {}},
      {"dyadic_step", {{}, {"k_max"}}},
      {"scaled_ball", {{"r"}, {}}},
  };
  return kinds;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string kinds_list(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

void require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field, "expected an object");
}

void reject_unknown(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(field.empty() ? key : field + "." + key, "unknown key");
  }
}

const json& member(const json& j, const std::string& field, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(field + "." + key, "missing");
  return *it;
}

double real(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
  return v;
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
  return j.get<int>();
}

std::vector<double> reals(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(real(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> positive_grid(const json& j, const std::string& field) {
  auto v = reals(j, field);
  if (v.empty()) throw ConfigError(field, "grid is empty");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0)) throw ConfigError(field + "[" + std::to_string(i) + "]", "grid values must be positive");
  return v;
}

ExponentSpec parse_exponent(const json& j, const std::string& field) {
  require_object(j, field);
  ExponentSpec s;
  const json& kind = member(j, field, "kind");
  if (!kind.is_string()) throw ConfigError(field + ".kind", "expected a string");
  s.kind = kind.get<std::string>();
  if (s.kind == "constant") {
    reject_unknown(j, field, {"kind", "p"});
    s.p = real(member(j, field, "p"), field + ".p");
  } else if (s.kind == "piecewise") {
    reject_unknown(j, field, {"kind", "breaks", "values"});
    s.breaks = reals(member(j, field, "breaks"), field + ".breaks");
    s.values = reals(member(j, field, "values"), field + ".values");
  } else if (s.kind == "smooth") {
    reject_unknown(j, field, {"kind", "formula_id", "params"});
    const json& f = member(j, field, "formula_id");
    if (!f.is_string() || !smooth_formula_from_string(f.get<std::string>()))
      throw ConfigError(field + ".formula_id", "unknown smooth formula");
    s.formula_id = f.get<std::string>();
    if (const auto it = j.find("params"); it != j.end()) {
      require_object(*it, field + ".params");
      reject_unknown(*it, field + ".params", {"base", "amplitude"});
      if (it->contains("base")) s.base = real((*it)["base"], field + ".params.base");
      if (it->contains("amplitude")) s.amplitude = real((*it)["amplitude"], field + ".params.amplitude");
    }
  } else {
    throw ConfigError(field + ".kind", "unknown exponent kind '" + s.kind + "' (constant, piecewise, smooth)");
  }
  try {
    (void)s.build();
  } catch (const InvalidInput& e) {
    throw ConfigError(field, e.what());
  }
  return s;
}

FuncSpec parse_func(const json& j, const std::string& field) {
  FuncSpec s;
  if (j.is_string()) {
    s.kind = "ref";
    s.ref = j.get<std::string>();
    return s;
  }
  require_object(j, field);
  const json& kind = member(j, field, "kind");
  if (!kind.is_string()) throw ConfigError(field + ".kind", "expected a string");
  s.kind = kind.get<std::string>();
  if (const auto it = leaf_kinds().find(s.kind); it != leaf_kinds().end()) {
    for (const auto& [key, _] : j.items()) {
      if (key == "kind") continue;
      const auto& sc = it->second;
      if (std::find(sc.reals.begin(), sc.reals.end(), key) == sc.reals.end() &&
          std::find(sc.ints.begin(), sc.ints.end(), key) == sc.ints.end())
        throw ConfigError(field + "." + key, "unknown parameter for kind '" + s.kind + "'");
    }
    for (const auto& p : it->second.reals) s.params[p] = real(member(j, field, p.c_str()), field + "." + p);
    for (const auto& p : it->second.ints) s.params[p] = integer(member(j, field, p.c_str()), field + "." + p);
    return s;
  }
  if (s.kind == "linear_combination") {
    reject_unknown(j, field, {"kind", "terms"});
    const json& terms = member(j, field, "terms");
    if (!terms.is_array() || terms.empty()) throw ConfigError(field + ".terms", "expected a non-empty array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tf = field + ".terms[" + std::to_string(i) + "]";
      require_object(terms[i], tf);
      reject_unknown(terms[i], tf, {"coef", "f"});
      s.coefs.push_back(real(member(terms[i], tf, "coef"), tf + ".coef"));
      s.args.push_back(parse_func(member(terms[i], tf, "f"), tf + ".f"));
    }
    return s;
  }
  if (s.kind == "product_with_sign" || s.kind == "abs") {
    reject_unknown(j, field, {"kind", "f"});
    s.args.push_back(parse_func(member(j, field, "f"), field + ".f"));
    return s;
  }
  std::set<std::string> known{"linear_combination", "product_with_sign", "abs"};
  for (const auto& [k, _] : leaf_kinds()) known.insert(k);
  throw ConfigError(field + ".kind", "unknown function kind '" + s.kind + "' (" + kinds_list(known) + ")");
}

ordered func_to_json(const FuncSpec& s) {
  if (s.kind == "ref") return s.ref;
  ordered j;
  j["kind"] = s.kind;
  if (const auto it = leaf_kinds().find(s.kind); it != leaf_kinds().end()) {
    for (const auto& p : it->second.reals) j[p] = s.params.at(p);
    for (const auto& p : it->second.ints) j[p] = static_cast<int>(s.params.at(p));
  } else if (s.kind == "linear_combination") {
    j["terms"] = ordered::array();
    for (std::size_t i = 0; i < s.args.size(); ++i) j["terms"].push_back({{"coef", s.coefs[i]}, {"f", func_to_json(s.args[i])}});
  } else {
    j["f"] = func_to_json(s.args.at(0));
  }
  return j;
}

ordered exponent_to_json(const ExponentSpec& s) {
  ordered j;
  j["kind"] = s.kind;
  if (s.kind == "constant") {
    j["p"] = s.p;
  } else if (s.kind == "piecewise") {
    j["breaks"] = s.breaks;
    j["values"] = s.values;
  } else {
    j["formula_id"] = s.formula_id;
    j["params"] = {{"base", s.base}, {"amplitude", s.amplitude}};
  }
  return j;
}

const std::map<std::string, ExponentSpec>& builtin_exponent_specs() {
  static const std::map<std::string, ExponentSpec> specs = [] {
    std::map<std::string, ExponentSpec> m;
    for (const auto& ne : catalog_exponents()) {
      const Exponent& e = ne.exponent;
      ExponentSpec s;
      if (auto c = e.constant_value()) {
        s.kind = "constant";
        s.p = *c;
      } else if (e.kind() == ExponentKind::piecewise) {
        s.kind = "piecewise";
        s.breaks.assign(e.piecewise_breaks().begin(), e.piecewise_breaks().end());
        s.values.assign(e.piecewise_values().begin(), e.piecewise_values().end());
      } else {
        s.kind = "smooth";
        s.formula_id = to_string(*e.smooth_formula());
        s.base = e.smooth_base();
        s.amplitude = e.smooth_amplitude();
      }
      m.emplace(ne.name, s);
    }
    return m;
  }();
  return specs;
}

void check_refs(const ExperimentConfig& c, const FuncSpec& s, const std::string& field, std::set<std::string>& stack) {
  if (s.kind == "ref") {
    if (stack.count(s.ref)) throw ConfigError(field, "function reference cycle through '" + s.ref + "'");
    if (const auto it = c.functions.find(s.ref); it != c.functions.end()) {
      stack.insert(s.ref);
      check_refs(c, it->second, "functions." + s.ref, stack);
      stack.erase(s.ref);
    } else if (!builtin_functions().count(s.ref)) {
      throw ConfigError(field, "unknown function '" + s.ref + "'");
    }
    return;
  }
  for (std::size_t i = 0; i < s.args.size(); ++i) check_refs(c, s.args[i], field + ".args[" + std::to_string(i) + "]", stack);
}

Func build_leaf(const FuncSpec& s) {
  const auto& p = s.params;
  if (s.kind == "zero") return Func::zero();
  if (s.kind == "constant") return Func::constant(p.at("c"));
  if (s.kind == "chi_interval") return Func::chi_interval(p.at("a"), p.at("b"));
  if (s.kind == "chi_annulus") return Func::chi_annulus(p.at("r_in"), p.at("r_out"));
  if (s.kind == "chi_ball") return Func::chi_ball(p.at("r"));
  if (s.kind == "chi_ring") return Func::chi_ring(static_cast<int>(p.at("k")));
  if (s.kind == "power") return Func::power(p.at("a"));
  if (s.kind == "sign") return Func::sign();
  if (s.kind == "dyadic_step") return Func::dyadic_step(static_cast<int>(p.at("k_max")));
  if (s.kind == "scaled_ball") return Func::scaled_ball(p.at("r"));
  throw InvalidInput("unknown function kind '" + s.kind + "'");
}

Func build_checked(const ExperimentConfig& c, const FuncSpec& s, int depth) {
  if (depth > 64) throw InvalidInput("function references nest too deeply");
  if (s.kind == "ref") {
    if (const auto it = c.functions.find(s.ref); it != c.functions.end()) return build_checked(c, it->second, depth + 1);
    const auto b = builtin_functions().find(s.ref);
    if (b == builtin_functions().end()) throw InvalidInput("unknown function '" + s.ref + "'");
    return build_checked(c, b->second, depth + 1);
  }
  if (s.kind == "linear_combination") {
    std::vector<std::pair<double, Func>> terms;
    for (std::size_t i = 0; i < s.args.size(); ++i) terms.emplace_back(s.coefs[i], build_checked(c, s.args[i], depth + 1));
    return Func::linear_combination(std::move(terms));
  }
  if (s.kind == "product_with_sign") return Func::with_sign(build_checked(c, s.args.at(0), depth + 1));
  if (s.kind == "abs") return Func::abs(build_checked(c, s.args.at(0), depth + 1));
  return build_leaf(s);
}

FuncSpec leaf(std::string kind, std::map<std::string, double> params = {}) {
  FuncSpec s;
  s.kind = std::move(kind);
  s.params = std::move(params);
  return s;
}

}  // namespace

Exponent ExponentSpec::build() const {
  if (kind == "constant") return Exponent::constant(p);
  if (kind == "piecewise") return Exponent::piecewise(breaks, values);
  if (kind == "smooth") {
    const auto f = smooth_formula_from_string(formula_id);
    if (!f) throw InvalidInput("unknown smooth formula '" + formula_id + "'");
    return Exponent::smooth(*f, base, amplitude);
  }
  throw InvalidInput("unknown exponent kind '" + kind + "'");
}

const std::map<std::string, FuncSpec>& builtin_functions() {
  static const std::map<std::string, FuncSpec> fs = [] {
    std::map<std::string, FuncSpec> m;
    m["zero"] = leaf("zero");
    m["one"] = leaf("constant", {{"c", 1.0}});
    m["chi01"] = leaf("chi_interval", {{"a", 0.0}, {"b", 1.0}});
    m["chi02"] = leaf("chi_interval", {{"a", 0.0}, {"b", 2.0}});
    m["chi_B1"] = leaf("chi_ball", {{"r", 1.0}});
    m["chi_B2"] = leaf("chi_ball", {{"r", 2.0}});
    m["chi_C0"] = leaf("chi_ring", {{"k", 0.0}});
    m["sgn"] = leaf("sign");
    m["abs_x"] = leaf("power", {{"a", 1.0}});
    m["dyadic_step"] = leaf("dyadic_step", {{"k_max", 40.0}});
    m["f0"] = leaf("scaled_ball", {{"r", 1.0}});
    FuncSpec sb;
    sb.kind = "product_with_sign";
    sb.args = {leaf("chi_ball", {{"r", 1.0}})};
    m["sgn_chi_B1"] = sb;
    return m;
  }();
  return fs;
}

std::vector<std::string> builtin_exponent_names() {
  std::vector<std::string> out;
  for (const auto& [k, _] : builtin_exponent_specs()) out.push_back(k);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "expected an object");
  reject_unknown(root, "", {"exponents", "functions", "grids", "tolerances", "statements", "outputs", "seed"});

  ExperimentConfig c;
  if (const auto it = root.find("exponents"); it != root.end()) {
    require_object(*it, "exponents");
    for (const auto& [name, spec] : it->items()) c.exponents[name] = parse_exponent(spec, "exponents." + name);
  }
  if (const auto it = root.find("functions"); it != root.end()) {
    require_object(*it, "functions");
    for (const auto& [name, spec] : it->items()) c.functions[name] = parse_func(spec, "functions." + name);
  }
  if (const auto it = root.find("grids"); it != root.end()) {
    const json& g = *it;
    require_object(g, "grids");
    reject_unknown(g, "grids",
                   {"radius", "dyadic_range", "p0_grid", "counterexample_p0", "delta_grid", "q_grid", "cbmo_q_grid",
                    "r_grid", "r", "alpha"});
    auto& G = c.grids;
    if (g.contains("radius")) G.radius = positive_grid(g["radius"], "grids.radius");
    if (g.contains("dyadic_range")) {
      const json& d = g["dyadic_range"];
      require_object(d, "grids.dyadic_range");
      reject_unknown(d, "grids.dyadic_range", {"k_min", "k_max"});
      DyadicRange r;
      r.k_min = integer(member(d, "grids.dyadic_range", "k_min"), "grids.dyadic_range.k_min");
      r.k_max = integer(member(d, "grids.dyadic_range", "k_max"), "grids.dyadic_range.k_max");
      if (r.k_min > r.k_max) throw ConfigError("grids.dyadic_range", "k_min exceeds k_max");
      G.dyadic_range = r;
    }
    auto above = [&](const char* key, double lo, bool strict) -> std::optional<std::vector<double>> {
      if (!g.contains(key)) return std::nullopt;
      const std::string field = std::string("grids.") + key;
      auto v = positive_grid(g[key], field);
      for (std::size_t i = 0; i < v.size(); ++i)
        if (strict ? !(v[i] > lo) : !(v[i] >= lo))
          throw ConfigError(field + "[" + std::to_string(i) + "]",
                            std::string("must be ") + (strict ? "> " : ">= ") + num(lo));
      return v;
    };
    G.p0_grid = above("p0_grid", 1.0, true);
    G.counterexample_p0 = above("counterexample_p0", 1.0, true);
    G.delta_grid = above("delta_grid", 0.0, true);
    if (G.delta_grid)
      for (std::size_t i = 0; i < G.delta_grid->size(); ++i)
        if ((*G.delta_grid)[i] >= 1.0)
          throw ConfigError("grids.delta_grid[" + std::to_string(i) + "]", "must lie in (0, 1)");
    G.q_grid = above("q_grid", 0.0, true);
    G.cbmo_q_grid = above("cbmo_q_grid", 1.0, false);
    G.r_grid = above("r_grid", 1.0, true);
    if (g.contains("r")) {
      G.r = real(g["r"], "grids.r");
      if (!(*G.r > 1.0)) throw ConfigError("grids.r", "must be > 1");
    }
    if (g.contains("alpha")) G.alpha = real(g["alpha"], "grids.alpha");
  }
  if (const auto it = root.find("tolerances"); it != root.end()) {
    require_object(*it, "tolerances");
    const auto defaults = TolerancePolicy::defaults();
    for (const auto& [id, t] : it->items()) {
      const std::string field = "tolerances." + id;
      if (!is_statement_id(id)) throw ConfigError(field, "unknown statement id");
      require_object(t, field);
      reject_unknown(t, field, {"abs_tol", "rel_tol", "slope_tol"});
      StatementTolerance st = defaults.at(id);
      if (t.contains("abs_tol")) st.abs_tol = real(t["abs_tol"], field + ".abs_tol");
      if (t.contains("rel_tol")) st.rel_tol = real(t["rel_tol"], field + ".rel_tol");
      if (t.contains("slope_tol")) st.slope_tol = real(t["slope_tol"], field + ".slope_tol");
      if (st.abs_tol < 0 || st.rel_tol < 0 || st.slope_tol < 0) throw ConfigError(field, "tolerances must be >= 0");
      c.tolerances[id] = st;
    }
  }
  if (const auto it = root.find("statements"); it != root.end()) {
    if (!it->is_array()) throw ConfigError("statements", "expected an array of statement ids");
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string field = "statements[" + std::to_string(i) + "]";
      if (!(*it)[i].is_string() || !is_statement_id((*it)[i].get<std::string>()))
        throw ConfigError(field, "unknown statement id");
      ids.push_back((*it)[i].get<std::string>());
    }
    c.statements = ids;
  }
  if (const auto it = root.find("outputs"); it != root.end()) {
    require_object(*it, "outputs");
    reject_unknown(*it, "outputs", {"json", "csv"});
    for (const char* key : {"json", "csv"}) {
      if (!it->contains(key)) continue;
      if (!(*it)[key].is_string()) throw ConfigError(std::string("outputs.") + key, "expected a path string");
      (key == std::string("json") ? c.outputs.json : c.outputs.csv) = (*it)[key].get<std::string>();
    }
  }
  if (const auto it = root.find("seed"); it != root.end()) {
    if (!it->is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    c.seed = it->get<std::uint64_t>();
  }
  for (const auto& [name, spec] : c.functions) {
    std::set<std::string> stack{name};
    check_refs(c, spec, "functions." + name, stack);
    try {
      (void)build_checked(c, spec, 0);
    } catch (const InvalidInput& e) {
      throw ConfigError("functions." + name, e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  ordered root = ordered::object();
  if (!c.exponents.empty()) {
    ordered e = ordered::object();
    for (const auto& [name, s] : c.exponents) e[name] = exponent_to_json(s);
    root["exponents"] = e;
  }
  if (!c.functions.empty()) {
    ordered f = ordered::object();
    for (const auto& [name, s] : c.functions) f[name] = func_to_json(s);
    root["functions"] = f;
  }
  ordered g = ordered::object();
  const auto& G = c.grids;
  if (G.radius) g["radius"] = *G.radius;
  if (G.dyadic_range) g["dyadic_range"] = {{"k_min", G.dyadic_range->k_min}, {"k_max", G.dyadic_range->k_max}};
  if (G.p0_grid) g["p0_grid"] = *G.p0_grid;
  if (G.counterexample_p0) g["counterexample_p0"] = *G.counterexample_p0;
  if (G.delta_grid) g["delta_grid"] = *G.delta_grid;
  if (G.q_grid) g["q_grid"] = *G.q_grid;
  if (G.cbmo_q_grid) g["cbmo_q_grid"] = *G.cbmo_q_grid;
  if (G.r_grid) g["r_grid"] = *G.r_grid;
  if (G.r) g["r"] = *G.r;
  if (G.alpha) g["alpha"] = *G.alpha;
  if (!g.empty()) root["grids"] = g;
  if (!c.tolerances.empty()) {
    ordered t = ordered::object();
    for (const auto& [id, st] : c.tolerances)
      t[id] = {{"abs_tol", st.abs_tol}, {"rel_tol", st.rel_tol}, {"slope_tol", st.slope_tol}};
    root["tolerances"] = t;
  }
  if (c.statements) root["statements"] = *c.statements;
  ordered o = ordered::object();
  if (c.outputs.json) o["json"] = *c.outputs.json;
  if (c.outputs.csv) o["csv"] = *c.outputs.csv;
  if (!o.empty()) root["outputs"] = o;
  if (c.seed) root["seed"] = *c.seed;
  return root.dump(2) + "\n";
}

Func build_function(const ExperimentConfig& config, const FuncSpec& spec) { return build_checked(config, spec, 0); }

Func resolve_function(const ExperimentConfig& config, const std::string& name) {
  FuncSpec s;
  s.kind = "ref";
  s.ref = name;
  return build_checked(config, s, 0);
}

Exponent resolve_exponent(const ExperimentConfig& config, const std::string& name) {
  if (const auto it = config.exponents.find(name); it != config.exponents.end()) return it->second.build();
  if (const auto it = builtin_exponent_specs().find(name); it != builtin_exponent_specs().end()) return it->second.build();
  throw InvalidInput("unknown exponent '" + name + "'");
}

HarnessConfig harness_config(const ExperimentConfig& c) {
  HarnessConfig h;
  if (c.seed) h.seed = *c.seed;
  if (c.statements) h.statements = *c.statements;
  for (const auto& [id, t] : c.tolerances) h.tolerances.set(id, t);
  VerifyInputs in = VerifyInputs::defaults(h.seed);
  const auto& G = c.grids;
  if (G.radius) {
    in.cbmo_radius_grid = *G.radius;
    in.equivalence_radius_grid = *G.radius;
    in.chi_radius_grid = *G.radius;
  }
  if (G.p0_grid) in.p0_grid = *G.p0_grid;
  if (G.counterexample_p0) in.counterexample_p0 = *G.counterexample_p0;
  if (G.delta_grid) in.delta_grid = *G.delta_grid;
  if (G.q_grid) in.herz.q_grid = *G.q_grid;
  if (G.cbmo_q_grid) in.q_grid = *G.cbmo_q_grid;
  if (G.r_grid) in.minkowski_r_grid = *G.r_grid;
  if (G.r) in.herz.r = *G.r;
  if (G.alpha) in.herz.alpha = *G.alpha;
  if (G.dyadic_range) {
    in.herz.k_min = G.dyadic_range->k_min;
    in.herz.k_max = G.dyadic_range->k_max;
  }
  h.inputs = std::move(in);
  return h;
}

}  // namespace cbmo::cli
