#include "cbmo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "cbmo/errors.hpp"
#include "parallel.hpp"
#include "text.hpp"

namespace cbmo {

using detail::num;

std::vector<NamedExponent> catalog_exponents() {
  return {
      {"const2", Exponent::constant(2.0)},
      {"const1.5", Exponent::constant(1.5)},
      {"const3", Exponent::constant(3.0)},
      {"const10", Exponent::constant(10.0)},
      {"pw_bump", Exponent::piecewise({-1.0, 1.0}, {3.0, 2.0, 3.0})},
      {"pw_steps", Exponent::piecewise({-4.0, -1.0, 1.0, 4.0}, {2.5, 3.0, 2.0, 3.0, 2.5})},
      {"pw23", Exponent::piecewise({0.5}, {2.0, 3.0})},
      {"smooth_abs", Exponent::smooth(SmoothFormula::inv_one_plus_abs, 2.0, 1.0)},
      {"smooth_sq", Exponent::smooth(SmoothFormula::inv_one_plus_sq, 2.0, 1.0)},
  };
}

namespace {

std::vector<NamedExponent> pick(const std::vector<NamedExponent>& all,
                                std::initializer_list<const char*> names) {
  std::vector<NamedExponent> out;
  for (const char* n : names) {
    const auto it = std::find_if(all.begin(), all.end(), [n](const NamedExponent& e) { return e.name == n; });
    if (it == all.end()) throw InvalidInput(std::string("unknown catalog exponent ") + n);
    out.push_back(*it);
  }
  return out;
}

std::vector<double> powers_of_two(int k_min, int k_max) { return dyadic_radius_grid(k_min, k_max); }

Func sgn_on_ball(double r) { return Func::product(Func::sign(), Func::chi_ball(r)); }

std::vector<SubsetPair> default_subset_pairs() {
  std::vector<SubsetPair> pairs;
  for (double R : {0.5, 1.0, 2.0, 8.0, 64.0}) {
    auto ball = [&](const std::string& name, double r) {
      pairs.push_back({R, name, Func::chi_ball(r), 2.0 * r});
    };
    auto ring = [&](const std::string& name, double a, double b) {
      pairs.push_back({R, name, Func::chi_annulus(a, b), 2.0 * (b - a)});
    };
    auto interval = [&](const std::string& name, double a, double b) {
      pairs.push_back({R, name, Func::chi_interval(a, b), b - a});
    };
    ball("B", R);
    ball("B/2", R / 2);
    ball("B/8", R / 8);
    ball("B/64", R / 64);
    ring("annulus(R/2,R)", R / 2, R);
    ring("annulus(R/4,R/2)", R / 4, R / 2);
    ring("annulus(R/1000,R/500)", R / 1000, R / 500);
    interval("[0,R/4]", 0.0, R / 4);
    interval("[-R,-R/2]", -R, -R / 2);
    interval("[R/3,R/2]", R / 3, R / 2);
  }
  return pairs;
}

}  // namespace

VerifyInputs VerifyInputs::defaults(std::uint64_t seed) {
  const auto cat = catalog_exponents();
  VerifyInputs in;

  in.duality_exponents = pick(cat, {"const2", "pw23", "pw_bump", "smooth_abs", "smooth_sq"});
  in.duality_funcs = {
      {"zero", Func::zero()},
      {"chi[0,1]", Func::chi_interval(0.0, 1.0)},
      {"chi_B(0,2)", Func::chi_ball(2.0)},
      {"2*chi[0,1]", 2.0 * Func::chi_interval(0.0, 1.0)},
      {"sgn*chi_B(0,1)", sgn_on_ball(1.0)},
      {"|x|^-0.25*chi_B(0,1)", Func::product(Func::power(-0.25), Func::chi_ball(1.0))},
      {"dyadic_step(3)", Func::dyadic_step(3)},
      {"chi_C2", Func::chi_ring(2)},
  };

  in.family_exponents = pick(cat, {"const2", "pw_bump", "smooth_abs"});
  in.families = {
      {"unit", {{0.0, 1.0}, {2.0, 3.0}}, {1.0, 2.0}, Func::constant(1.0)},
      {"half", {{0.0, 1.0}}, {1.0}, Func::chi_interval(0.0, 0.5)},
      {"power", {{0.0, 1.0}, {1.0, 2.0}, {4.0, 8.0}}, {1.0, 0.5, 3.0}, Func::power(-0.2)},
      {"linear", {{-2.0, -1.0}, {0.5, 1.0}, {3.0, 5.0}}, {1.0, 1.0, 1.0}, Func::power(1.0)},
      {"zero-weights", {{0.0, 1.0}}, {0.0}, Func::constant(1.0)},
      {"dyadic", {{1.0, 2.5}, {4.0, 6.0}}, {1.0, 1.0}, Func::dyadic_step(4)},
  };
  for (int i = 1; i <= 9; ++i) in.delta_grid.push_back(0.1 * i);

  in.ball_exponents =
      pick(cat, {"const1.5", "const2", "const3", "const10", "pw_bump", "pw_steps", "smooth_abs", "smooth_sq"});
  in.chi_radius_grid = powers_of_two(-5, 10);
  in.subset_pairs = default_subset_pairs();
  in.p0_grid = {1.1, 1.25, 1.4};

  in.counterexample_p0 = {2.0, 4.0};
  in.counterexample_exponents = pick(cat, {"pw_bump", "smooth_abs"});
  in.cbmo_radius_grid = powers_of_two(-10, 20);

  in.space_exponents = pick(cat, {"const2", "pw_bump", "smooth_abs"});
  const Func mixed = sgn_on_ball(4.0) + 0.5 * Func::chi_ring(3);
  in.embedding_funcs = {
      {"one", Func::constant(1.0)},
      {"sgn", Func::sign()},
      {"chi[0,1]", Func::chi_interval(0.0, 1.0)},
      {"chi_B(0,1)", Func::chi_ball(1.0)},
      {"sgn*chi_B(0,4)+0.5*chi_C3", mixed},
      {"dyadic_step", Func::dyadic_step(40)},
  };
  in.q_grid = {2.0, 4.0, 8.0};
  in.equivalence_funcs = {
      {"one", Func::constant(1.0)},
      {"sgn", Func::sign()},
      {"chi[0,1]", Func::chi_interval(0.0, 1.0)},
      {"sgn*chi_B(0,4)+0.5*chi_C3", mixed},
  };
  in.equivalence_radius_grid = powers_of_two(-10, 20);

  in.identity_symbols = {
      {"|y|", Func::power(1.0)},
      {"sgn", Func::sign()},
      {"chi[0,1]", Func::chi_interval(0.0, 1.0)},
      {"dyadic_step", Func::dyadic_step(40)},
  };
  in.identity_radii = {0.5, 1.0, 2.0, 3.7, 10.0};

  in.commutator.symbol = {"sgn", Func::sign()};
  in.commutator.exponents = pick(cat, {"const2"});
  for (int m = -4; m <= 10; ++m) {
    const double s = std::ldexp(1.0, m);
    in.commutator.bank.push_back({"chi_B(0,2^" + std::to_string(m) + ")", Func::chi_ball(s), s});
    in.commutator.bank.push_back({"chi_C" + std::to_string(m), Func::chi_ring(m), s});
  }
  in.commutator.divergent_symbol = NamedFunc{"dyadic_step", Func::dyadic_step(40)};
  for (int m = 1; m <= 12; ++m) in.commutator.divergent_m.push_back(m);

  in.minkowski_lists = {
      {{"chi[0,1]", Func::chi_interval(0.0, 1.0)}},
      {{"chi_C0", Func::chi_ring(0)}, {"chi_C1", Func::chi_ring(1)}},
      {{"sgn*chi_B(0,1)", sgn_on_ball(1.0)}, {"sgn*chi_B(0,1)", sgn_on_ball(1.0)}},
  };
  for (auto& list : random_function_lists(50, seed)) in.minkowski_lists.push_back(std::move(list));
  in.minkowski_r_grid = {1.5, 2.0, 3.0};

  in.herz.symbol = {"sgn", Func::sign()};
  in.herz.exponent = pick(cat, {"const2"}).front();
  in.herz.alpha = 0.0;
  in.herz.q_grid = {0.5, 1.0, 2.0};
  in.herz.r = 2.0;
  for (int m = -3; m <= 6; ++m) {
    const double s = std::ldexp(1.0, m);
    in.herz.sequences.push_back({"scale 2^" + std::to_string(m),
                                 {Func::chi_annulus(s / 2, s), 0.5 * Func::chi_annulus(s, 2 * s), sgn_on_ball(s / 4)},
                                 s});
  }
  return in;
}

std::vector<CheckReport> run_harness(const HarnessConfig& config) {
  std::set<std::string> wanted;
  for (const auto& id : config.statements) {
    if (!is_statement_id(id)) throw InvalidInput("unknown statement id '" + id + "'");
    wanted.insert(id);
  }
  if (wanted.empty()) wanted.insert(statement_ids().begin(), statement_ids().end());

  const VerifyInputs in = config.inputs ? *config.inputs : VerifyInputs::defaults(config.seed);
  const TolerancePolicy& tol = config.tolerances;
  const double cap = tol.bounded_cap;
  SpaceOptions sopts;
  sopts.divergence_min_r2 = tol.divergence_min_r2;
  QuadOptions tight;
  tight.abs_tol = 1e-11;
  tight.rel_tol = 1e-13;

  using Job = std::function<std::vector<CheckReport>()>;
  struct Entry {
    std::vector<std::string> ids;
    Job run;
  };
  const std::vector<Entry> jobs{
      {{"eq1.1"}, [&] { return std::vector{check_duality(in.duality_exponents, in.duality_funcs, tol.at("eq1.1"))}; }},
      {{"lemma2.2"},
       [&] {
         return std::vector{check_diening_single_family(in.family_exponents, in.families, in.delta_grid,
                                                        tol.at("lemma2.2"), cap)};
       }},
      {{"lemma2.3"},
       [&] { return std::vector{check_chi_product(in.ball_exponents, in.chi_radius_grid, tol.at("lemma2.3"), cap)}; }},
      {{"lemma2.4", "lemma2.5"},
       [&] {
         auto r = check_subset_ratios(in.ball_exponents, in.subset_pairs, in.p0_grid, tol.at("lemma2.4"),
                                      tol.at("lemma2.5"), cap);
         return std::vector{r.subset_powers, r.p0_improvement};
       }},
      {{"prop3.1"},
       [&] {
         return std::vector{check_counterexample(in.counterexample_p0, in.counterexample_exponents,
                                                 in.counterexample_k_max, in.cbmo_radius_grid, tol.at("prop3.1"),
                                                 tol.divergence_min_r2, sopts)};
       }},
      {{"prop3.2"},
       [&] {
         return std::vector{check_embedding_cbmo_q(in.space_exponents, in.q_grid, in.embedding_funcs,
                                                   in.cbmo_radius_grid, tol.at("prop3.2"), cap, sopts)};
       }},
      {{"prop3.3", "prop3.4"},
       [&] {
         auto r = check_norm_equivalences(in.space_exponents, in.equivalence_funcs, in.equivalence_radius_grid,
                                          tol.at("prop3.3"), tol.at("prop3.4"), cap, sopts);
         return std::vector{r.center_collection, r.inf_center};
       }},
      {{"thm4.1-forward"},
       [&] { return std::vector{check_commutator_bounded(in.commutator, tol.at("thm4.1-forward"), cap, sopts)}; }},
      {{"thm4.1-converse-identity"},
       [&] {
         return std::vector{check_commutator_identity(in.identity_symbols, in.identity_radii, in.identity_points,
                                                      tol.at("thm4.1-converse-identity"))};
       }},
      {{"lemma5.1"},
       [&] { return std::vector{check_minkowski(in.minkowski_lists, in.minkowski_r_grid, tol.at("lemma5.1"), tight)}; }},
      {{"thm5.1"}, [&] { return std::vector{check_vv_herz(in.herz, tol.at("thm5.1"), cap, sopts)}; }},
  };

  std::vector<const Entry*> selected;
  for (const auto& j : jobs)
    if (std::any_of(j.ids.begin(), j.ids.end(), [&](const std::string& id) { return wanted.count(id) > 0; }))
      selected.push_back(&j);

  std::vector<std::vector<CheckReport>> results(selected.size());
  const int threads = config.jobs > 0 ? config.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  detail::parallel_for(selected.size(), threads, [&](std::size_t i) { results[i] = selected[i]->run(); });

  std::map<std::string, CheckReport> by_id;
  for (auto& group : results)
    for (auto& r : group)
      if (wanted.count(r.statement_id)) by_id[r.statement_id] = std::move(r);
  std::vector<CheckReport> out;
  for (const auto& id : statement_ids())
    if (by_id.count(id)) out.push_back(std::move(by_id[id]));
  return out;
}

std::string summary_table(const std::vector<CheckReport>& reports, bool require_all) {
  if (require_all) {
    std::vector<std::string> missing;
    for (const auto& id : statement_ids())
      if (std::none_of(reports.begin(), reports.end(), [&](const CheckReport& r) { return r.statement_id == id; }))
        missing.push_back(id);
    if (!missing.empty()) throw Error("refusing to summarize: no report for " + detail::join(missing, ", "));
  }
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("-"); };
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-26s %-6s %-14s %-14s %s\n", "statement", "result", "constant", "exponent",
                "witnesses");
  out += line;
  int passed = 0;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-26s %-6s %-14s %-14s %zu\n", r.statement_id.c_str(), r.pass ? "PASS" : "FAIL",
                  opt(r.empirical_constant).c_str(), opt(r.fitted_exponent).c_str(), r.witnesses.size());
    out += line;
    passed += r.pass ? 1 : 0;
  }
  out += std::to_string(passed) + "/" + std::to_string(reports.size()) + " statements passed\n";
  return out;
}

}  // namespace cbmo
