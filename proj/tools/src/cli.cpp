#include "cbmo_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cbmo/harness.hpp"
#include "cbmo/norms.hpp"
#include "cbmo/operators.hpp"
#include "cbmo/spaces.hpp"
#include "cbmo_cli/config.hpp"
#include "cbmo_cli/report_io.hpp"

namespace cbmo::cli {

namespace {

using ordered = nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string json_path;
  std::string csv_path;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c, bool with_seed) {
  app->add_option("--config", c.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--json", c.json_path, "write machine-readable output here ('-' for stdout)");
  app->add_option("--csv", c.csv_path, "write the per-scale breakdown as CSV");
  app->add_option("--tol", c.tol, "absolute tolerance override")->check(CLI::PositiveNumber);
  if (with_seed) app->add_option("--seed", c.seed, "seed for randomized banks");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s = buf;
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

// Only the digits the error bound supports, so bisection noise is not printed.
std::string fmt_value(double v, double err) {
  if (!std::isfinite(v) || v == 0.0 || !std::isfinite(err)) return fmt(v);
  int digits = 15;
  if (err > 0.0) digits = std::clamp(static_cast<int>(std::ceil(std::log10(std::fabs(v) / err))), 6, 15);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  std::string s = buf;
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

ordered jnum(double v) {
  if (std::isfinite(v)) return v;
  return exact_number(v);
}

void write_file(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) return;
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + path + "'");
  f << content;
}

ExperimentConfig load(const Common& c) { return c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path); }

std::string json_target(const Common& c, const ExperimentConfig& cfg) {
  return !c.json_path.empty() ? c.json_path : cfg.outputs.json.value_or("");
}
std::string csv_target(const Common& c, const ExperimentConfig& cfg) {
  return !c.csv_path.empty() ? c.csv_path : cfg.outputs.csv.value_or("");
}

QuadOptions quad_options(const Common& c) {
  QuadOptions q;
  if (c.tol) q.abs_tol = *c.tol;
  return q;
}

std::string quad_line(const QuadOptions& q) {
  return "tolerances quad_abs=" + fmt(q.abs_tol) + " quad_rel=" + fmt(q.rel_tol);
}

ordered quad_json(const QuadOptions& q) { return {{"quad_abs", q.abs_tol}, {"quad_rel", q.rel_tol}}; }

Domain parse_domain(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto number = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw InvalidInput("--domain: bad number in '" + text + "'");
    }
  };
  if (parts.size() == 1 && parts[0] == "full") return Domain::full();
  if (parts.size() == 2 && parts[0] == "ball") return Domain::ball(number(1));
  if (parts.size() == 3 && parts[0] == "annulus") return Domain::annulus(number(1), number(2));
  if (parts.size() == 2 && parts[0] == "ring") {
    const double k = number(1);
    if (k != std::floor(k)) throw InvalidInput("--domain: ring index must be an integer");
    return Domain::ring(static_cast<int>(k));
  }
  throw InvalidInput("--domain: expected full, ball:R, annulus:A:B or ring:K, got '" + text + "'");
}

std::vector<double> radius_grid(const ExperimentConfig& cfg, std::optional<int> kmin, std::optional<int> kmax) {
  if (kmin || kmax) return dyadic_radius_grid(kmin.value_or(-10), kmax.value_or(20));
  if (cfg.grids.radius) return *cfg.grids.radius;
  return dyadic_radius_grid();
}

std::string breakdown_csv(const char* scale_name, const SpaceNormResult& r) {
  std::string out = std::string(scale_name) + ",contribution\n";
  for (const auto& e : r.breakdown) out += exact_number(e.scale) + "," + exact_number(e.contribution) + "\n";
  return out;
}

ordered breakdown_json(const SpaceNormResult& r) {
  ordered b = ordered::array();
  for (const auto& e : r.breakdown) b.push_back({{"scale", jnum(e.scale)}, {"contribution", jnum(e.contribution)}});
  return b;
}

// --- subcommands -----------------------------------------------------------

struct NormArgs {
  Common c;
  std::string f, p, domain = "full";
};

int cmd_norm(const NormArgs& a, std::ostream& out) {
  const auto cfg = load(a.c);
  const Func f = resolve_function(cfg, a.f);
  const Exponent e = resolve_exponent(cfg, a.p);
  NormOptions opts;
  opts.quad = quad_options(a.c);
  const NormResult r = luxemburg_norm(f, e, parse_domain(a.domain), opts);
  out << "f=" << a.f << " p=" << a.p << " domain=" << a.domain << "\n"
      << "value " << fmt_value(r.value, r.abs_error_bound) << "\n"
      << "abs_error_bound " << fmt(r.abs_error_bound) << "\n"
      << "bisection_iters " << r.bisection_iters << "\n"
      << quad_line(opts.quad) << " width_rel=" << fmt(opts.width_rel) << " width_abs=" << fmt(opts.width_abs) << "\n";
  ordered j;
  j["f"] = a.f;
  j["p"] = a.p;
  j["domain"] = a.domain;
  j["value"] = jnum(r.value);
  j["abs_error_bound"] = jnum(r.abs_error_bound);
  j["bisection_iters"] = r.bisection_iters;
  j["tolerances"] = quad_json(opts.quad);
  j["tolerances"]["width_rel"] = opts.width_rel;
  j["tolerances"]["width_abs"] = opts.width_abs;
  write_file(json_target(a.c, cfg), j.dump(2) + "\n", out);
  return exit_ok;
}

struct OpArgs {
  Common c;
  std::string op = "hardy", f, b;
  std::vector<double> x{-2.0, -0.5, 0.25, 0.5, 1.0, 2.0, 4.0};
};

int cmd_op(const OpArgs& a, std::ostream& out) {
  const auto cfg = load(a.c);
  const Func f = resolve_function(cfg, a.f);
  const bool commutator = a.op.rfind("commutator", 0) == 0;
  if (commutator && a.b.empty()) throw InvalidInput("--b: required for " + a.op);
  if (!commutator && !a.b.empty()) throw InvalidInput("--b: only commutators take a symbol");
  const std::optional<Func> b = commutator ? std::optional(resolve_function(cfg, a.b)) : std::nullopt;
  OperatorOptions opts;
  opts.quad = quad_options(a.c);

  out << "op=" << a.op << " f=" << a.f << (b ? " b=" + a.b : "") << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-22s %s\n", "x", "value", "abs_error_bound");
  out << line;
  std::string csv = "x,value,abs_error_bound\n";
  ordered rows = ordered::array();
  for (double x : a.x) {
    OperatorSample s;
    if (a.op == "hardy") s = hardy(f, x, opts);
    else if (a.op == "dual_hardy") s = dual_hardy(f, x, opts);
    else if (a.op == "commutator_hardy") s = commutator_hardy(*b, f, x, opts);
    else if (a.op == "commutator_dual_hardy") s = commutator_dual_hardy(*b, f, x, opts);
    else {
      const MaximalSample m = maximal(f, x, {}, opts.quad);
      s = {m.x, m.value, m.abs_error_bound};
    }
    std::snprintf(line, sizeof line, "%-16s %-22s %s\n", fmt(x).c_str(), fmt(s.value).c_str(),
                  fmt(s.abs_error_bound).c_str());
    out << line;
    csv += exact_number(x) + "," + exact_number(s.value) + "," + exact_number(s.abs_error_bound) + "\n";
    rows.push_back({{"x", jnum(x)}, {"value", jnum(s.value)}, {"abs_error_bound", jnum(s.abs_error_bound)}});
  }
  out << quad_line(opts.quad) << "\n";
  ordered j;
  j["op"] = a.op;
  j["f"] = a.f;
  if (b) j["b"] = a.b;
  j["samples"] = rows;
  j["tolerances"] = quad_json(opts.quad);
  write_file(json_target(a.c, cfg), j.dump(2) + "\n", out);
  write_file(csv_target(a.c, cfg), csv, out);
  return exit_ok;
}

struct CbmoArgs {
  Common c;
  std::string f, p = "const2", variant = "var";
  double q = 1.0;
  std::optional<int> kmin, kmax;
};

int cmd_cbmo(const CbmoArgs& a, std::ostream& out) {
  const auto cfg = load(a.c);
  const Func f = resolve_function(cfg, a.f);
  const auto grid = radius_grid(cfg, a.kmin, a.kmax);
  SpaceOptions opts;
  opts.norm.quad = quad_options(a.c);
  SpaceNormResult r;
  std::string label;
  if (a.variant == "classical") {
    r = cbmo_classical_norm(f, a.q, 1, grid, opts);
    label = "q=" + fmt(a.q);
  } else {
    const Exponent e = resolve_exponent(cfg, a.p);
    r = a.variant == "inf" ? cbmo_inf_norm(f, e, grid, opts) : cbmo_var_norm(f, e, grid, opts);
    label = "p=" + a.p;
  }
  out << "variant=" << a.variant << " f=" << a.f << " " << label << " radii=" << grid.size() << "\n"
      << "value " << fmt_value(r.value, r.abs_error_bound) << "\n"
      << "abs_error_bound " << fmt(r.abs_error_bound) << "\n"
      << "diverges " << (r.diverges ? "yes" : "no") << "\n";
  if (r.divergence_fit)
    out << "last_decade_slope " << fmt(r.divergence_fit->slope) << " r2 " << fmt(r.divergence_fit->r_squared) << "\n";
  out << quad_line(opts.norm.quad) << " divergence_slope=" << fmt(opts.divergence_slope)
      << " divergence_min_r2=" << fmt(opts.divergence_min_r2) << "\n";
  ordered j;
  j["variant"] = a.variant;
  j["f"] = a.f;
  if (a.variant == "classical") j["q"] = a.q;
  else j["p"] = a.p;
  j["value"] = jnum(r.value);
  j["abs_error_bound"] = jnum(r.abs_error_bound);
  j["diverges"] = r.diverges;
  if (r.divergence_fit)
    j["divergence_fit"] = {{"slope", jnum(r.divergence_fit->slope)},
                           {"r_squared", jnum(r.divergence_fit->r_squared)},
                           {"points", r.divergence_fit->points}};
  j["breakdown"] = breakdown_json(r);
  j["tolerances"] = quad_json(opts.norm.quad);
  j["tolerances"]["divergence_slope"] = opts.divergence_slope;
  j["tolerances"]["divergence_min_r2"] = opts.divergence_min_r2;
  write_file(json_target(a.c, cfg), j.dump(2) + "\n", out);
  write_file(csv_target(a.c, cfg), breakdown_csv("radius", r), out);
  return exit_ok;
}

struct HerzArgs {
  Common c;
  std::string f, p = "const2";
  std::optional<double> alpha;
  double q = 1.0;
  std::optional<int> kmin, kmax;
};

int cmd_herz(const HerzArgs& a, std::ostream& out) {
  const auto cfg = load(a.c);
  const Func f = resolve_function(cfg, a.f);
  const Exponent e = resolve_exponent(cfg, a.p);
  const double alpha = a.alpha.value_or(cfg.grids.alpha.value_or(0.0));
  const DyadicRange range = cfg.grids.dyadic_range.value_or(DyadicRange{});
  const int kmin = a.kmin.value_or(range.k_min), kmax = a.kmax.value_or(range.k_max);
  if (kmin > kmax) throw InvalidInput("--kmin: exceeds --kmax");
  SpaceOptions opts;
  opts.norm.quad = quad_options(a.c);
  const SpaceNormResult r = herz_norm(f, e, alpha, a.q, kmin, kmax, opts);
  out << "f=" << a.f << " p=" << a.p << " alpha=" << fmt(alpha) << " q=" << fmt(a.q) << " k=[" << kmin << ", "
      << kmax << "]\n"
      << "value " << fmt_value(r.value, r.abs_error_bound + r.tail_bound) << "\n"
      << "tail_bound " << fmt(r.tail_bound) << "\n"
      << "abs_error_bound " << fmt(r.abs_error_bound) << "\n"
      << quad_line(opts.norm.quad) << " tail_rel=" << fmt(opts.tail_rel_tol) << "\n";
  ordered j;
  j["f"] = a.f;
  j["p"] = a.p;
  j["alpha"] = alpha;
  j["q"] = a.q;
  j["k_min"] = kmin;
  j["k_max"] = kmax;
  j["value"] = jnum(r.value);
  j["tail_bound"] = jnum(r.tail_bound);
  j["abs_error_bound"] = jnum(r.abs_error_bound);
  j["breakdown"] = breakdown_json(r);
  j["tolerances"] = quad_json(opts.norm.quad);
  j["tolerances"]["tail_rel"] = opts.tail_rel_tol;
  write_file(json_target(a.c, cfg), j.dump(2) + "\n", out);
  write_file(csv_target(a.c, cfg), breakdown_csv("k", r), out);
  return exit_ok;
}

struct VerifyArgs {
  Common c;
  bool all = false;
  std::vector<std::string> statements;
  std::vector<double> p0;
  int jobs = 0;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.all == !a.statements.empty()) throw InvalidInput("verify: give exactly one of --all or --statement");
  for (const auto& id : a.statements)
    if (!is_statement_id(id)) throw InvalidInput("--statement: unknown statement id '" + id + "'");
  for (double p0 : a.p0)
    if (!(p0 > 1.0)) throw InvalidInput("--p0: values must exceed 1");
  ExperimentConfig cfg = load(a.c);
  if (a.c.seed) cfg.seed = *a.c.seed;
  if (!a.p0.empty()) cfg.grids.counterexample_p0 = a.p0;
  if (a.all) cfg.statements.reset();
  else cfg.statements = a.statements;
  HarnessConfig h = harness_config(cfg);
  if (a.c.tol) h.tolerances.override_abs(*a.c.tol);
  h.jobs = a.jobs;

  const auto reports = run_harness(h);
  out << summary_table(reports, a.all);
  if (a.c.tol) out << "tolerance override abs=" << fmt(*a.c.tol) << "\n";
  write_file(json_target(a.c, cfg), reports_to_json(reports), out);
  write_file(csv_target(a.c, cfg), reports_to_csv(reports), out);
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
  return ok ? exit_ok : exit_check_failed;
}

struct ReportArgs {
  std::string input, json_path, csv_path;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw InvalidInput("--input: cannot open '" + a.input + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto reports = reports_from_json(ss.str());
  out << summary_table(reports, false);
  write_file(a.json_path, reports_to_json(reports), out);
  write_file(a.csv_path, reports_to_csv(reports), out);
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-exponent norms, Hardy-type operators and central BMO / Herz spaces", "cbmo"};
  app.require_subcommand(1);

  NormArgs norm;
  auto* s_norm = app.add_subcommand("norm", "Luxemburg norm of a function");
  add_common(s_norm, norm.c, false);
  s_norm->add_option("--f", norm.f, "function name")->required();
  s_norm->add_option("--p", norm.p, "exponent name")->required();
  s_norm->add_option("--domain", norm.domain, "full, ball:R, annulus:A:B or ring:K");

  OpArgs op;
  auto* s_op = app.add_subcommand("op", "Sample a Hardy-type or maximal operator");
  add_common(s_op, op.c, false);
  s_op->add_option("--op", op.op)->check(
      CLI::IsMember({"hardy", "dual_hardy", "commutator_hardy", "commutator_dual_hardy", "maximal"}));
  s_op->add_option("--f", op.f, "function name")->required();
  s_op->add_option("--b", op.b, "commutator symbol");
  s_op->add_option("--x", op.x, "sample points")->delimiter(',');

  CbmoArgs cbmo;
  auto* s_cbmo = app.add_subcommand("cbmo", "Central BMO norms over a radius grid");
  add_common(s_cbmo, cbmo.c, false);
  s_cbmo->add_option("--f", cbmo.f, "function name")->required();
  s_cbmo->add_option("--p", cbmo.p, "exponent name");
  s_cbmo->add_option("--variant", cbmo.variant)->check(CLI::IsMember({"var", "inf", "classical"}));
  s_cbmo->add_option("--q", cbmo.q, "classical exponent")->check(CLI::Range(1.0, 1e300));
  s_cbmo->add_option("--kmin", cbmo.kmin, "radius grid 2^kmin..2^kmax");
  s_cbmo->add_option("--kmax", cbmo.kmax);

  HerzArgs herz;
  auto* s_herz = app.add_subcommand("herz", "Homogeneous Herz norm");
  add_common(s_herz, herz.c, false);
  s_herz->add_option("--f", herz.f, "function name")->required();
  s_herz->add_option("--p", herz.p, "exponent name");
  s_herz->add_option("--alpha", herz.alpha);
  s_herz->add_option("--q", herz.q)->check(CLI::PositiveNumber);
  s_herz->add_option("--kmin", herz.kmin);
  s_herz->add_option("--kmax", herz.kmax);

  VerifyArgs verify;
  auto* s_verify = app.add_subcommand("verify", "Run the statement checks");
  add_common(s_verify, verify.c, true);
  s_verify->add_flag("--all", verify.all, "every statement");
  s_verify->add_option("--statement", verify.statements, "statement id (repeatable)");
  s_verify->add_option("--p0", verify.p0, "counterexample exponents")->delimiter(',');
  s_verify->add_option("--jobs", verify.jobs, "concurrent checks (0 = all cores)")->check(CLI::NonNegativeNumber);

  ReportArgs report;
  auto* s_report = app.add_subcommand("report", "Summarize a saved JSON report");
  s_report->add_option("--input", report.input, "report JSON")->required();
  s_report->add_option("--json", report.json_path, "rewrite in canonical form");
  s_report->add_option("--csv", report.csv_path, "witness rows as CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (s_norm->parsed()) return cmd_norm(norm, out);
    if (s_op->parsed()) return cmd_op(op, out);
    if (s_cbmo->parsed()) return cmd_cbmo(cbmo, out);
    if (s_herz->parsed()) return cmd_herz(herz, out);
    if (s_verify->parsed()) return cmd_verify(verify, out);
    return cmd_report(report, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

}  // namespace cbmo::cli
