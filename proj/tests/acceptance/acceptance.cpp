// One line per acceptance criterion; exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cbmo/fit.hpp"
#include "cbmo/harness.hpp"
#include "cbmo/norms.hpp"
#include "cbmo/operators.hpp"
#include "cbmo/spaces.hpp"
#include "cbmo/verify.hpp"
#include "cbmo_cli/cli.hpp"
#include "oracles.hpp"

using namespace cbmo;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// A catalog function with \int |f|^p in closed form.
struct Closed {
  std::string name;
  Func f;
  std::function<double(double)> integral_of_power;
};

std::vector<Closed> closed_forms() {
  return {
      {"chi[0,1]", Func::chi_interval(0.0, 1.0), [](double) { return 1.0; }},
      {"chi_B(0,2)", Func::chi_ball(2.0), [](double) { return 4.0; }},
      {"2 chi[0,1]", 2.0 * Func::chi_interval(0.0, 1.0), [](double p) { return std::pow(2.0, p); }},
      {"sgn chi_B(0,1)", Func::with_sign(Func::chi_ball(1.0)), [](double) { return 2.0; }},
      {"|x|^-1/4 chi_B(0,1)", Func::product(Func::power(-0.25), Func::chi_ball(1.0)),
       [](double p) { return 2.0 / (1.0 - p / 4.0); }},
      {"chi_C2", Func::chi_ring(2), [](double) { return 4.0; }},
      {"dyadic_step(3)", Func::dyadic_step(3),
       [](double p) {
         double s = 0.0;
         for (int k = 0; k <= 3; ++k) s += 2.0 * std::pow(2.0, k * p);
         return s;
       }},
      {"f0 on B(0,1)", Func::scaled_ball(1.0), [](double p) { return std::pow(2.0, 1.0 - p) / (p + 1.0); }},
      {"|x| chi_B(0,2)", Func::product(Func::power(1.0), Func::chi_ball(2.0)),
       [](double p) { return 2.0 * std::pow(2.0, p + 1.0) / (p + 1.0); }},
      {"chi[0,1] + chi[0,2]", Func::chi_interval(0.0, 1.0) + Func::chi_interval(0.0, 2.0),
       [](double p) { return std::pow(2.0, p) + 1.0; }},
  };
}

std::vector<NamedExponent> five_exponents() {
  const auto cat = catalog_exponents();
  std::vector<NamedExponent> out;
  for (const char* n : {"const2", "pw_bump", "pw_steps", "smooth_abs", "smooth_sq"})
    for (const auto& e : cat)
      if (e.name == n) out.push_back(e);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome c1_luxemburg() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0.0;
  int pairs = 0;
  for (const auto& c : closed_forms())
    for (double p : {2.0, 3.0}) {
      const double want = std::pow(c.integral_of_power(p), 1.0 / p);
      const double got = luxemburg_norm(c.f, Exponent::constant(p), Domain::full()).value;
      worst = std::max(worst, std::abs(got - want) / want);
      ++pairs;
    }
  const double plastic = luxemburg_norm(Func::chi_interval(0.0, 2.0), Exponent::piecewise({1.0}, {2.0, 3.0}),
                                        Domain::full())
                             .value;
  const double gap = std::abs(plastic - oracle::plastic_number());
  const double secs = seconds_since(t0);
  o.pass = pairs == 20 && worst <= 1e-7 && gap <= 1e-6 && secs < 10.0;
  o.detail = std::to_string(pairs) + " pairs, max rel err " + num(worst) + "; plastic gap " + num(gap) + "; " +
             num(secs) + " s";
  return o;
}

Outcome c2_unit_ball() {
  Outcome o;
  double worst = 0.0;
  int n = 0;
  for (const auto& e : five_exponents())
    for (const auto& c : closed_forms()) {
      const double norm = luxemburg_norm(c.f, e.exponent, Domain::full()).value;
      worst = std::max(worst, std::abs(scaled_modular(c.f, e.exponent, Domain::full(), norm).value - 1.0));
      ++n;
    }
  o.pass = worst <= 1e-6;
  o.detail = std::to_string(n) + " (f, p) pairs, max |rho(f/||f||) - 1| = " + num(worst);
  return o;
}

Outcome c3_power_identity() {
  Outcome o;
  double worst = 0.0;
  int n = 0;
  for (const auto& e : five_exponents())
    for (double p0 : {1.25, 1.5}) {
      const Exponent scaled = e.exponent.scaled(1.0 / p0);
      for (const auto& c : closed_forms()) {
        const double lhs = luxemburg_norm(c.f, e.exponent, Domain::full()).value;
        const double rhs = std::pow(luxemburg_norm(Func::abs_power(c.f, p0), scaled, Domain::full()).value, 1.0 / p0);
        worst = std::max(worst, std::abs(lhs - rhs) / lhs);
        ++n;
      }
    }
  o.pass = worst <= 1e-6;
  o.detail = std::to_string(n) + " cases, max rel gap " + num(worst);
  return o;
}

Outcome c4_chi_product() {
  Outcome o;
  const auto grid = dyadic_radius_grid(-5, 10);
  auto ratio = [](const Exponent& e, double r) {
    return chi_norm(Domain::ball(r), e).value * chi_norm(Domain::ball(r), e.conjugate()).value / (2.0 * r);
  };
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0, 10.0})
    for (double r : grid) worst = std::max(worst, std::abs(ratio(Exponent::constant(p), r) - 1.0));
  std::string pw;
  bool pw_ok = true;
  const auto cat = catalog_exponents();
  for (const char* name : {"pw_bump", "pw_steps"}) {
    const auto& e = std::find_if(cat.begin(), cat.end(), [&](const NamedExponent& x) { return x.name == name; })->exponent;
    std::vector<double> vals, inv;
    for (double r : grid) {
      vals.push_back(ratio(e, r));
      inv.push_back(1.0 / r);
    }
    const double sup = *std::max_element(vals.begin(), vals.end());
    const auto hi = last_decade_fit(grid, vals);
    const auto lo = last_decade_fit(inv, vals);
    const double slope = std::max(hi ? hi->slope : 0.0, lo ? lo->slope : 0.0);
    pw_ok = pw_ok && std::isfinite(sup) && slope < 0.05;
    pw += std::string(name) + " sup " + num(sup) + " slope " + num(slope) + "; ";
  }
  o.pass = worst <= 1e-8 && pw_ok;
  o.detail = "constant p max |ratio - 1| = " + num(worst) + "; " + pw;
  return o;
}

Outcome c5_subset() {
  Outcome o;
  const auto in = VerifyInputs::defaults();
  double worst = 0.0;
  int n = 0;
  for (double p : {1.5, 2.0, 3.0, 10.0}) {
    const Exponent e = Exponent::constant(p);
    for (const auto& pair : in.subset_pairs) {
      const double ratio = chi_norm(Domain::ball(pair.ball_radius), e).value /
                           luxemburg_norm(pair.subset, e, Domain::full()).value;
      const double measure_ratio = 2.0 * pair.ball_radius / pair.subset_measure;
      for (double p0 : in.p0_grid) {
        if (p0 > p) continue;
        worst = std::max(worst, ratio / std::pow(measure_ratio, 1.0 / p0));
        ++n;
      }
    }
  }
  const auto cat = catalog_exponents();
  std::vector<NamedExponent> pw;
  for (const auto& e : cat)
    if (e.name == "pw_bump" || e.name == "pw_steps") pw.push_back(e);
  const auto rep = check_subset_ratios(pw, in.subset_pairs, in.p0_grid, TolerancePolicy::defaults().at("lemma2.4"),
                                       TolerancePolicy::defaults().at("lemma2.5"), 1e6);
  const bool finite = rep.p0_improvement.empirical_constant && std::isfinite(*rep.p0_improvement.empirical_constant);
  o.pass = in.subset_pairs.size() == 50 && worst <= 1.0 + 1e-6 && finite;
  o.detail = std::to_string(in.subset_pairs.size()) + " (B, S) pairs, " + std::to_string(n) +
             " constant-p cases, max ratio/(|B|/|S|)^{1/p0} = " + num(worst) + "; piecewise constant " +
             (finite ? num(*rep.p0_improvement.empirical_constant) : std::string("none"));
  return o;
}

Outcome c6_counterexample() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const Func f = Func::dyadic_step(40);
  const auto grid = dyadic_radius_grid(-10, 20);
  const auto cls = cbmo_classical_norm(f, 1.0, 1, grid);
  const double cls_slope = cls.divergence_fit ? cls.divergence_fit->slope : 0.0;
  bool ok = std::isfinite(cls.value) && cls_slope < 0.05;
  std::string detail = "p=1 sup " + num(cls.value) + " slope " + num(cls_slope);
  for (double p0 : {2.0, 4.0}) {
    const auto r = cbmo_var_norm(f, Exponent::constant(p0), grid);
    const double slope = r.divergence_fit ? r.divergence_fit->slope : 0.0;
    ok = ok && std::abs(slope - (1.0 - 1.0 / p0)) <= 0.05;
    detail += "; p0=" + num(p0) + " slope " + num(slope) + " (target " + num(1.0 - 1.0 / p0) + ")";
  }
  const double secs = seconds_since(t0);
  o.pass = ok && secs < 60.0;
  o.detail = detail + "; " + num(secs) + " s";
  return o;
}

Outcome c7_identity() {
  Outcome o;
  const auto in = VerifyInputs::defaults();
  const auto rep = check_commutator_identity(in.identity_symbols, in.identity_radii, in.identity_points,
                                             TolerancePolicy::defaults().at("thm4.1-converse-identity"));
  double worst = 0.0;
  for (const auto& w : rep.witnesses) worst = std::max(worst, std::abs(w.lhs - w.rhs));
  const int points = static_cast<int>(in.identity_symbols.size() * in.identity_radii.size()) * in.identity_points;
  o.pass = points == 400 && worst <= 1e-6 && rep.pass;
  o.detail = std::to_string(points) + " points, max residual " + num(worst);
  return o;
}

Outcome c8_forward() {
  Outcome o;
  const Exponent two = Exponent::constant(2.0);
  const Func b = Func::sign();
  std::vector<double> scales, ratios_h, ratios_hs;
  int bank = 0;
  for (int m = -4; m <= 10; ++m) {
    const double s = std::ldexp(1.0, m);
    for (const Func& f : {Func::chi_ball(s), Func::chi_ring(m)}) {
      const double nf = luxemburg_norm(f, two, Domain::full()).value;
      scales.push_back(s);
      ratios_h.push_back(luxemburg_norm(commutator_hardy_func(b, f), two, Domain::full()).value / nf);
      ratios_hs.push_back(luxemburg_norm(commutator_dual_hardy_func(b, f), two, Domain::full()).value / nf);
      ++bank;
    }
  }
  const double sup = std::max(*std::max_element(ratios_h.begin(), ratios_h.end()),
                              *std::max_element(ratios_hs.begin(), ratios_hs.end()));
  const auto fh = last_decade_fit(scales, ratios_h);
  const auto fhs = last_decade_fit(scales, ratios_hs);
  const double slope = std::max(fh ? fh->slope : 0.0, fhs ? fhs->slope : 0.0);

  const Func step = Func::dyadic_step(40);
  bool increasing = true;
  double prev = 0.0;
  std::string seq;
  for (int m = 1; m <= 12; ++m) {
    const Func f = Func::chi_ball(std::ldexp(1.0, m));
    const double r =
        luxemburg_norm(commutator_hardy_func(step, f), two, Domain::full()).value / luxemburg_norm(f, two, Domain::full()).value;
    increasing = increasing && (m == 1 || r > prev);
    prev = r;
    if (m == 1 || m == 12) seq += (m == 1 ? "" : "..") + num(r);
  }
  o.pass = bank == 30 && std::isfinite(sup) && slope < 0.05 && increasing;
  o.detail = std::to_string(bank) + "-function bank sup " + num(sup) + ", last-decade slope " + num(slope) +
             "; dyadic-step ratios " + seq + (increasing ? " strictly increasing" : " NOT increasing");
  return o;
}

Outcome c9_minkowski() {
  Outcome o;
  const auto lists = random_function_lists(50, 7);
  const std::vector<double> rs{1.5, 2.0, 3.0};
  QuadOptions q;
  q.abs_tol = 1e-11;
  const auto rep = check_minkowski(lists, rs, StatementTolerance{}, q);
  double worst = -INFINITY;
  for (const auto& w : rep.witnesses) worst = std::max(worst, w.lhs - w.rhs);
  o.pass = rep.witnesses.size() == 150 && worst <= 1e-8;
  o.detail = std::to_string(lists.size()) + " lists x 3 r, max lhs - rhs = " + num(worst);
  return o;
}

Outcome c10_vv_herz() {
  Outcome o;
  const auto in = VerifyInputs::defaults();
  const auto rep = check_vv_herz(in.herz, TolerancePolicy::defaults().at("thm5.1"), 1e6);
  double gap = INFINITY;
  for (const auto& w : rep.witnesses)
    if (w.input.rfind("q=1 branch agreement", 0) == 0) gap = w.lhs;
  const bool both = rep.notes.find("q <= 1 branch ran") != std::string::npos &&
                    rep.notes.find("q > 1 branch ran") != std::string::npos;
  const double slope = rep.fitted_exponent.value_or(INFINITY);
  o.pass = rep.pass && both && gap <= 1e-9 && slope < 0.05 && in.herz.sequences.size() == 10;
  o.detail = std::to_string(in.herz.sequences.size()) + " sequences, sup ratio " +
             num(rep.empirical_constant.value_or(NAN)) + ", slope " + num(slope) + ", q=1 branch gap " + num(gap) +
             (both ? ", both branches ran" : ", a branch did not run");
  return o;
}

Outcome c11_determinism() {
  Outcome o;
  const char* dir = std::getenv("CBMO_TEST_TMP");
  const auto base = std::filesystem::path(dir ? dir : std::filesystem::temp_directory_path().string());
  const std::string a = (base / "acceptance_run_a.json").string(), b = (base / "acceptance_run_b.json").string();
  std::ostringstream sink;
  const int ca = cli::run({"verify", "--all", "--seed", "7", "--json", a}, sink, sink);
  const int cb = cli::run({"verify", "--all", "--seed", "7", "--json", b}, sink, sink);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string ja = slurp(a), jb = slurp(b);
  o.pass = ca == cb && ca != cli::exit_usage && !ja.empty() && ja == jb;
  o.detail = "exit codes " + std::to_string(ca) + "/" + std::to_string(cb) + ", " + std::to_string(ja.size()) +
             " bytes, " + (ja == jb ? "identical" : "DIFFERENT");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Luxemburg-norm correctness", c1_luxemburg},
      {"2 Unit-ball property", c2_unit_ball},
      {"3 Power identity", c3_power_identity},
      {"4 Characteristic-norm product", c4_chi_product},
      {"5 Subset bound with p0", c5_subset},
      {"6 CBMO counterexample", c6_counterexample},
      {"7 Commutator decomposition", c7_identity},
      {"8 Commutator boundedness (no counterexample)", c8_forward},
      {"9 Generalized Minkowski", c9_minkowski},
      {"10 Vector-valued Herz bound", c10_vv_herz},
      {"11 Deterministic reports", c11_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
