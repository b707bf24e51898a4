#include <doctest.h>

#include <cmath>

#include "cbmo/errors.hpp"
#include "cbmo/operators.hpp"
#include "oracles.hpp"

using namespace cbmo;

TEST_CASE("Hardy operator of a ball indicator") {
  const Func f = Func::chi_ball(1.0);
  CHECK(hardy(f, 0.5).value == doctest::Approx(2.0));
  CHECK(hardy(f, -0.5).value == doctest::Approx(2.0));
  CHECK(hardy(f, 4.0).value == doctest::Approx(0.5));
  const auto s = hardy(f, 3.0);
  CHECK(s.x == 3.0);
  CHECK(s.abs_error_bound <= 1e-8);
}

TEST_CASE("dual Hardy operator") {
  const Func f = Func::chi_interval(0.0, 1.0);
  for (double x : {0.01, 0.3, -0.3, 0.9}) CHECK(dual_hardy(f, x).value == doctest::Approx(-std::log(std::abs(x))).epsilon(1e-9));
  CHECK(dual_hardy(f, 2.0).value == 0.0);
  // Power tail: \int_{|y|>x} |y|^{-2} dy = 2 / x
  CHECK(dual_hardy(Func::power(-1.0), 4.0).value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("commutators with the sign symbol") {
  const Func b = Func::sign(), f = Func::chi_ball(1.0);
  CHECK(commutator_hardy(b, f, 0.5).value == doctest::Approx(2.0));
  CHECK(commutator_hardy(b, f, 2.0).value == doctest::Approx(1.0));
  CHECK(commutator_hardy(b, f, -0.5).value == doctest::Approx(-2.0));
  CHECK(commutator_dual_hardy(b, f, 0.25).value == doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-9));
  CHECK(commutator_dual_hardy(b, f, 1.5).value == 0.0);
}

TEST_CASE("commutator against the definition b Tf - T(bf)") {
  const Func b = Func::power(1.0);
  const Func f = Func::chi_interval(-0.5, 2.0);
  for (double x : {0.3, 1.1, -1.7, 3.0}) {
    const double direct = commutator_hardy(b, f, x).value;
    const double split = b(x) * hardy(f, x).value - hardy(Func::product(b, f), x).value;
    CHECK(direct == doctest::Approx(split).epsilon(1e-9));
    const double direct_dual = commutator_dual_hardy(b, f, x).value;
    const double split_dual = b(x) * dual_hardy(f, x).value - dual_hardy(Func::product(b, f), x).value;
    CHECK(direct_dual == doctest::Approx(split_dual).epsilon(1e-9));
  }
}

TEST_CASE("exact decomposition of the oscillation") {
  const Func b = Func::power(1.0);
  const double r = 2.0;
  const Func chi = Func::chi_ball(r), f0 = Func::scaled_ball(r);
  for (double x : {0.1, 0.7, -1.3, 1.9}) {
    const double lhs = b(x) - 1.0;  // mean of |y| on [-2, 2] is 1
    const double rhs = std::abs(x) / (2.0 * r) * commutator_hardy(b, chi, x).value + commutator_dual_hardy(b, f0, x).value;
    CHECK(std::abs(lhs - rhs) <= 1e-9);
  }
}

TEST_CASE("singular points are rejected") {
  CHECK_THROWS_AS(hardy(Func::chi_ball(1.0), 0.0), InvalidInput);
  CHECK_THROWS_AS(commutator_hardy(Func::sign(), Func::chi_ball(1.0), 0.0), InvalidInput);
  CHECK_THROWS_AS(hardy(Func::chi_ball(1.0), 0.5, OperatorOptions{0, {}}), InvalidInput);
}

TEST_CASE("dimension 2 radial Hardy operator") {
  OperatorOptions o;
  o.dim = 2;
  // |x|^{-2} \int_{B(0,|x|)} chi_{B(0,1)} = pi for |x| <= 1
  CHECK(hardy(Func::chi_ball(1.0), 0.5, o).value == doctest::Approx(M_PI));
  CHECK(hardy(Func::chi_ball(1.0), 2.0, o).value == doctest::Approx(M_PI / 4.0));
}

TEST_CASE("maximal function") {
  const Func f = Func::chi_interval(0.0, 1.0);
  const auto m = maximal(f, 2.0);
  CHECK(m.value == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(m.best_radius == doctest::Approx(2.0));
  CHECK(m.radius_normalized == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(maximal(f, 0.5).value == doctest::Approx(1.0));
  // The grid can only underestimate: compare with a dense scan.
  for (double x : {-0.7, 1.3, 5.0}) {
    double best = 0.0;
    for (int i = 1; i <= 20000; ++i) {
      const double r = 1e-3 * i;
      best = std::max(best, (std::min(x + r, 1.0) - std::max(x - r, 0.0)) / (2 * r));
    }
    CHECK(maximal(f, x).value <= best + 1e-12);
    CHECK(maximal(f, x).value >= best - 1e-6);
  }
  CHECK(default_maximal_grid().size() == 81);
}

TEST_CASE("lazy operator outputs") {
  const Func f = Func::chi_ball(1.0);
  const Func hf = hardy_func(f);
  CHECK(hf.is_expensive());
  CHECK(hf.parity() == Parity::even);
  for (double x : {0.3, 1.7, -2.5}) CHECK(hf(x) == doctest::Approx(hardy(f, x).value));
  const auto sp = hf.singular_points();
  CHECK(std::find(sp.begin(), sp.end(), 1.0) != sp.end());
  CHECK(std::find(sp.begin(), sp.end(), 0.0) != sp.end());
  CHECK(hf.abs_bound(2.0, 4.0) >= 1.0 - 1e-12);

  const Func c = commutator_hardy_func(Func::sign(), f);
  CHECK(c.parity() == Parity::odd);
  CHECK(c(0.5) == doctest::Approx(2.0));
  // Evaluating at b's jump does not throw inside the lazy wrapper.
  CHECK(std::isfinite(commutator_dual_hardy_func(Func::sign(), f)(0.0)));
  for (double x = 0.05; x < 10.0; x *= 1.7) CHECK(std::abs(c(x)) <= c.abs_bound(x / 2, x * 2) + 1e-12);
  CHECK(dual_hardy_func(f)(0.5) == doctest::Approx(2.0 * std::log(2.0)));
}
