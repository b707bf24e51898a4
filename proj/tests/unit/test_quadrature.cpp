#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cbmo/errors.hpp"
#include "cbmo/quadrature.hpp"

using namespace cbmo;

namespace {
const double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("smooth and singular integrands") {
  auto r = integrate_interval([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.abs_error_bound <= 1e-9);
  const QuadOptions tight{1e-12, 1e-13, 4000};
  r = integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, tight);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
  r = integrate_interval([](double x) { return std::log(x); }, 0.0, 1.0, {}, tight);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("infinite ranges") {
  auto r = integrate_interval([](double x) { return std::exp(-x); }, 0.0, inf);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-11));
  r = integrate_interval([](double x) { return 1.0 / (1.0 + x * x); }, -inf, inf);
  CHECK(r.value == doctest::Approx(M_PI).epsilon(1e-11));
  r = integrate_interval([](double x) { return std::pow(x, -1.5); }, 1.0, inf);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("breakpoints make jumps exact") {
  auto step = [](double x) { return x < 1.0 / 3.0 ? 1.0 : (x < 0.7 ? -2.0 : 5.0); };
  const std::vector<double> bp{1.0 / 3.0, 0.7};
  const auto r = integrate_interval(step, 0.0, 1.0, bp);
  CHECK(r.value == doctest::Approx(1.0 / 3.0 - 2.0 * (0.7 - 1.0 / 3.0) + 5.0 * 0.3).epsilon(1e-14));
  CHECK(r.subdivisions <= 6);
  // Breakpoints outside the range are ignored.
  const std::vector<double> far{-5.0, 10.0};
  CHECK(integrate_interval([](double) { return 1.0; }, 0.0, 2.0, far).value == doctest::Approx(2.0));
}

TEST_CASE("reversed and empty ranges") {
  CHECK(integrate_interval([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
  CHECK_THROWS_AS(integrate_interval([](double x) { return x; }, 1.0, 0.0), InvalidInput);
}

TEST_CASE("budget exhaustion carries the partial estimate") {
  QuadOptions tight;
  tight.abs_tol = 1e-15;
  tight.rel_tol = 0.0;
  tight.max_subdivisions = 3;
  try {
    integrate_interval([](double x) { return std::sin(1.0 / x); }, 1e-4, 1.0, {}, tight);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(std::isfinite(e.partial_estimate()));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("balls, annuli and rings") {
  auto one = [](double) { return 1.0; };
  CHECK(integrate_ball(one, Ball{1.5, 1}).value == doctest::Approx(3.0));
  CHECK(integrate_ball(one, Ball{1.0, 2}, {}, Symmetry::radial).value == doctest::Approx(M_PI).epsilon(1e-13));
  CHECK(integrate_annulus(one, Annulus{1.0, 2.0, 2}, {}, Symmetry::radial).value ==
        doctest::Approx(3.0 * M_PI).epsilon(1e-13));
  for (int k : {-30, -3, 0, 4, 40})
    CHECK(integrate_dyadic_ring(one, k).value == doctest::Approx(std::ldexp(1.0, k)).epsilon(1e-13));
  // 1-D annulus of an odd integrand vanishes.
  CHECK(std::abs(integrate_annulus([](double x) { return x * x * x; }, Annulus{0.5, 3.0, 1}).value) <= 1e-12);
  // Unbounded annulus.
  CHECK(integrate_annulus([](double x) { return 1.0 / (x * x); }, Annulus{1.0, inf, 1}).value ==
        doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("geometry") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
  const auto c = Annulus::dyadic_ring(3, 1);
  CHECK(c.r_in == 4.0);
  CHECK(c.r_out == 8.0);
  CHECK(c.volume() == doctest::Approx(8.0));
}
