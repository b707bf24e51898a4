#include <doctest.h>

#include <cmath>

#include "cbmo/errors.hpp"
#include "cbmo/norms.hpp"
#include "oracles.hpp"

using namespace cbmo;

TEST_CASE("constant exponent reduces to the classical norm") {
  const auto two = Exponent::constant(2.0);
  CHECK(luxemburg_norm(Func::chi_interval(0.0, 1.0), two, Domain::full()).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(luxemburg_norm(Func::chi_ball(2.0), two, Domain::full()).value == doctest::Approx(2.0).epsilon(1e-9));
  const auto three = Exponent::constant(3.0);
  // \int_{-1}^{1} |x|^{-3/4} = 8
  CHECK(luxemburg_norm(Func::product(Func::power(-0.25), Func::chi_ball(1.0)), three, Domain::full()).value ==
        doctest::Approx(std::cbrt(8.0)).epsilon(1e-8));
}

TEST_CASE("plastic number for chi_[0,2] with p = 2 then 3") {
  const auto e = Exponent::piecewise({1.0}, {2.0, 3.0});
  const auto r = luxemburg_norm(Func::chi_interval(0.0, 2.0), e, Domain::full());
  CHECK(std::abs(r.value - oracle::plastic_number()) <= 1e-8);
  CHECK(r.abs_error_bound <= 1e-7);
  CHECK(r.bracket_lo <= r.value);
  CHECK(r.value <= r.bracket_hi);
  CHECK(r.bisection_iters > 0);
}

TEST_CASE("smooth exponent against an independent bisection") {
  const auto e = Exponent::smooth(SmoothFormula::inv_one_plus_sq, 2.0, 1.0);
  const Func f = Func::chi_annulus(0.5, 3.0) + Func::chi_interval(0.0, 1.0);
  auto rho = [&](double lam) {
    return oracle::piecewise(
        [&](double x) { return std::pow(std::abs(f(x)) / lam, e(x)); }, {-3, -0.5, 0, 0.5, 1, 3}, 400);
  };
  const double want = oracle::luxemburg(rho, 0.1, 10.0);
  CHECK(luxemburg_norm(f, e, Domain::full()).value == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("domains restrict the function") {
  const auto two = Exponent::constant(2.0);
  const Func one = Func::constant(1.0);
  CHECK(luxemburg_norm(one, two, Domain::ball(2.0)).value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(luxemburg_norm(one, two, Domain::annulus(1.0, 3.0)).value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(luxemburg_norm(one, two, Domain::ring(3)).value == doctest::Approx(std::sqrt(8.0)).epsilon(1e-9));
  CHECK_THROWS_AS(luxemburg_norm(one, two, Domain::full()), NotInSpace);
}

TEST_CASE("zero function") {
  const auto r = luxemburg_norm(Func::zero(), Exponent::constant(2.0), Domain::full());
  CHECK(r.value == 0.0);
  CHECK(luxemburg_norm(Func::chi_interval(5.0, 6.0), Exponent::constant(2.0), Domain::ball(1.0)).value == 0.0);
}

TEST_CASE("exponents outside P are rejected") {
  CHECK_THROWS_AS(luxemburg_norm(Func::chi_ball(1.0), Exponent::constant(1.0), Domain::full()), InvalidInput);
}

TEST_CASE("modular") {
  const auto e = Exponent::piecewise({1.0}, {2.0, 3.0});
  const auto m = modular(2.0 * Func::chi_interval(0.0, 2.0), e, Domain::full());
  CHECK(m.value == doctest::Approx(4.0 + 8.0));
  CHECK(scaled_modular(2.0 * Func::chi_interval(0.0, 2.0), e, Domain::full(), 2.0).value == doctest::Approx(2.0));
}

TEST_CASE("characteristic norms") {
  const auto e = Exponent::constant(3.0);
  CHECK(chi_norm(Domain::ball(4.0), e).value == doctest::Approx(2.0));
  CHECK(chi_norm(Domain::ball(1.0, 2), Exponent::constant(2.0, 2)).value == doctest::Approx(std::sqrt(M_PI)));
  const auto pw = Exponent::piecewise({-1.0, 1.0}, {3.0, 2.0, 3.0});
  CHECK(chi_norm(Domain::ball(0.5), pw).value == doctest::Approx(1.0));  // p = 2 on B(0, 1/2)
  const auto lux = luxemburg_norm(Func::chi_ball(3.0), pw, Domain::full()).value;
  CHECK(chi_norm(Domain::ball(3.0), pw).value == doctest::Approx(lux).epsilon(1e-9));
  CHECK_THROWS_AS(chi_norm(Domain::full(), e), NotInSpace);
}

TEST_CASE("duality constant and bracket") {
  CHECK(duality_constant(Exponent::constant(2.0)) == doctest::Approx(2.0));
  CHECK(duality_constant(Exponent::piecewise({0.5}, {2.0, 3.0})) == doctest::Approx(1.0 + 0.5 + 1.0 / 3.0));
  const auto e = Exponent::piecewise({0.5}, {2.0, 3.0});
  const Func f = Func::chi_interval(0.0, 1.0) + Func::chi_ring(2);
  const auto bank = default_dual_bank(f, e);
  const auto d = dual_pairing_sup(f, e, bank);
  CHECK(d.lower <= d.upper);
  CHECK(d.lower / d.norm >= 0.9);
  CHECK(d.lower / d.norm <= d.r_p + 1e-6);
  // Constant p: Hoelder is sharp, the extremizer attains ||f||.
  const auto two = Exponent::constant(2.0);
  const auto d2 = dual_pairing_sup(f, two, default_dual_bank(f, two));
  CHECK(d2.lower == doctest::Approx(d2.norm).epsilon(1e-7));
  std::vector<Func> empty;
  CHECK_THROWS_AS(dual_pairing_sup(f, e, empty), InvalidInput);
  const auto z = dual_pairing_sup(Func::zero(), e, bank);
  CHECK(z.lower == 0.0);
  CHECK(z.norm == 0.0);
}

TEST_CASE("radial norms in dimension 2") {
  const auto e = Exponent::constant(2.0, 2);
  // ||chi_{B(0,1)}||_2 in R^2 = sqrt(pi)
  CHECK(luxemburg_norm(Func::chi_ball(1.0), e, Domain::full(2)).value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-9));
  CHECK_THROWS_AS(luxemburg_norm(Func::chi_interval(0.0, 1.0), e, Domain::full(2)), InvalidInput);
  CHECK_THROWS_AS(luxemburg_norm(Func::chi_ball(1.0), Exponent::constant(2.0), Domain::full(2)), InvalidInput);
}
