#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cbmo/errors.hpp"
#include "cbmo/func.hpp"
#include "oracles.hpp"

using namespace cbmo;

TEST_CASE("catalog values") {
  CHECK(Func::zero()(3.0) == 0.0);
  CHECK(Func::constant(2.5)(-7.0) == 2.5);
  const auto chi = Func::chi_interval(0.0, 1.0);
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(1.0 + 1e-12) == 0.0);
  const auto ann = Func::chi_annulus(1.0, 2.0);
  CHECK(ann(-1.5) == 1.0);
  CHECK(ann(1.0) == 1.0);
  CHECK(ann(2.0) == 0.0);
  CHECK(Func::chi_ring(1)(1.5) == 1.0);
  CHECK(Func::chi_ring(1)(0.99) == 0.0);
  CHECK(Func::power(-0.5)(4.0) == doctest::Approx(0.5));
  CHECK(Func::sign()(-3.0) == -1.0);
  CHECK(Func::sign()(0.0) == 0.0);
}

TEST_CASE("dyadic step follows the sets A_k") {
  const auto f = Func::dyadic_step(40);
  CHECK(f(1.5) == 1.0);    // A_0 = (1, 2]
  CHECK(f(2.5) == 2.0);    // A_1 = (2, 3]
  CHECK(f(4.5) == 4.0);    // A_2 = (4, 5]
  CHECK(f(5.5) == 0.0);
  CHECK(f(-4.5) == -4.0);
  CHECK(f(std::ldexp(1.0, 40) + 0.5) == std::ldexp(1.0, 40));
  CHECK(f(std::ldexp(1.0, 41) + 0.5) == 0.0);
  CHECK(f.parity() == Parity::odd);
  CHECK_THROWS_AS(Func::dyadic_step(-1), InvalidInput);
}

TEST_CASE("scaled ball f0") {
  const auto f0 = Func::scaled_ball(2.0);
  CHECK(f0(1.0) == doctest::Approx(1.0 / 4.0));
  CHECK(f0(-2.0) == 0.0);
  const auto f2 = Func::scaled_ball(1.0, 2);
  CHECK(f2(0.5) == doctest::Approx(0.25 / M_PI));
}

TEST_CASE("metadata") {
  const auto f = Func::chi_interval(-1.0, 2.0) + 3.0 * Func::chi_ring(3);
  CHECK(f.support_radius() == doctest::Approx(8.0));
  const auto sp = f.singular_points();
  for (double s : {-1.0, 2.0, 4.0, 8.0, -4.0, -8.0}) CHECK(std::find(sp.begin(), sp.end(), s) != sp.end());
  CHECK(std::is_sorted(sp.begin(), sp.end()));
  CHECK(std::isinf(Func::power(1.0).support_radius()));
  CHECK(Func::sign().parity() == Parity::odd);
  CHECK(Func::chi_ball(1.0).parity() == Parity::even);
  CHECK(Func::with_sign(Func::chi_ball(1.0)).parity() == Parity::odd);
  CHECK(Func::chi_interval(0.0, 1.0).parity() == Parity::none);
  CHECK(Func::zero().is_structurally_zero());
  CHECK_FALSE(Func::constant(1.0).is_structurally_zero());
}

TEST_CASE("abs bound is an upper bound") {
  const auto f = Func::linear_combination({{2.0, Func::chi_ball(1.0)}, {-3.0, Func::chi_ring(2)}});
  for (double x = -5.0; x <= 5.0; x += 0.01) CHECK(std::abs(f(x)) <= f.abs_bound(0.0, 5.0) + 1e-15);
  CHECK(f.abs_bound(5.0, 10.0) == 0.0);
  CHECK(std::isinf(Func::power(-0.5).abs_bound(0.0, 1.0)));
  CHECK(Func::power(-0.5).abs_bound(1.0, 4.0) == doctest::Approx(1.0));
}

TEST_CASE("checked evaluation refuses singular points") {
  CHECK_THROWS_AS(Func::chi_interval(0.0, 1.0).evaluate(1.0), InvalidInput);
  CHECK_THROWS_AS(Func::power(-0.5).evaluate(0.0), InvalidInput);
  CHECK(Func::chi_interval(0.0, 1.0).evaluate(0.5) == 1.0);
  CHECK_THROWS_AS(Func::chi_interval(1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(Func::chi_annulus(2.0, 1.0), InvalidInput);
}

TEST_CASE("composites") {
  const auto g = Func::abs(Func::sign() - Func::constant(0.5));
  CHECK(g(-1.0) == doctest::Approx(1.5));
  CHECK(g(1.0) == doctest::Approx(0.5));
  CHECK(shifted(Func::constant(3.0), 1.0)(0.0) == 2.0);
  CHECK(Func::abs_power(Func::constant(-2.0), 3.0)(0.0) == doctest::Approx(8.0));
  const auto lr = Func::lr_aggregate({Func::constant(3.0), Func::constant(4.0)}, 2.0);
  CHECK(lr(0.0) == doctest::Approx(5.0));
  const auto p = Func::product(Func::power(1.0), Func::chi_ball(2.0));
  CHECK(p(-1.5) == doctest::Approx(1.5));
  CHECK(p.support_radius() == doctest::Approx(2.0));
}

TEST_CASE("integrals against an independent quadrature") {
  struct Case {
    Func f;
    double r;
    std::vector<double> cuts;
  };
  const std::vector<Case> cases{
      {Func::chi_interval(0.0, 1.0), 2.0, {-2, 0, 1, 2}},
      {Func::power(-0.5), 1.0, {}},  // closed form below
      {Func::dyadic_step(5), 40.0, {-40, -33, -32, -17, -16, -9, -8, -5, -4, -3, -2, -1, 1, 2, 3, 4, 5, 8, 9, 16, 17, 32, 33, 40}},
      {Func::scaled_ball(1.5), 1.5, {-1.5, 0, 1.5}},
      {Func::product(Func::power(2.0), Func::chi_interval(-0.3, 0.9)), 1.0, {-1, -0.3, 0, 0.9, 1}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.f.describe());
    const double got = integrate_func_ball(c.f, Ball{c.r, 1}).value;
    const double want = c.cuts.empty() ? 4.0 : oracle::piecewise([&](double x) { return c.f(x); }, c.cuts);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("odd functions have mean zero on every ball") {
  const std::vector<Func> odd{Func::sign(), Func::dyadic_step(40), Func::with_sign(Func::chi_annulus(0.3, 2.0)),
                              Func::with_sign(Func::power(-0.25))};
  for (const auto& f : odd)
    for (int k = -6; k <= 20; ++k) {
      // the integral is held to an absolute tolerance, so the mean to that over |B|
      const double r = std::ldexp(1.0, k);
      CHECK(std::abs(mean_on_ball(f, Ball{r, 1}).value) <= 1e-9 * std::max(1.0, 1.0 / r));
    }
}

TEST_CASE("radial integrals in higher dimension") {
  const auto r = integrate_func_ball(Func::constant(1.0), Ball{2.0, 3});
  CHECK(r.value == doctest::Approx(4.0 / 3.0 * M_PI * 8.0).epsilon(1e-12));
  // \int_{R^2} chi_{B(0,1)} |x|^{-1} = 2 pi
  CHECK(integrate_func_full(Func::product(Func::power(-1.0), Func::chi_ball(1.0)), 2).value ==
        doctest::Approx(2.0 * M_PI).epsilon(1e-9));
}
