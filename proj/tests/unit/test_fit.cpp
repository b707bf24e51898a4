#include <doctest.h>

#include <cmath>
#include <vector>

#include "cbmo/errors.hpp"
#include "cbmo/fit.hpp"

using namespace cbmo;

TEST_CASE("exact line") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.points == 4);
}

TEST_CASE("degenerate inputs") {
  const std::vector<double> x{2, 2, 2}, y{1, 5, 3};
  CHECK(fit_line(x, y).slope == 0.0);
  const std::vector<double> xc{0, 1, 2}, yc{4, 4, 4};
  CHECK(fit_line(xc, yc).r_squared == doctest::Approx(1.0));
}

TEST_CASE("noisy data lowers r squared") {
  const std::vector<double> x{0, 1, 2, 3, 4, 5}, y{0, 3, -1, 4, 0, 5};
  const auto f = fit_line(x, y);
  CHECK(f.r_squared < 0.6);
  CHECK(f.r_squared >= 0.0);
}

TEST_CASE("last decade power law") {
  std::vector<double> s, v;
  for (int k = -10; k <= 20; ++k) {
    s.push_back(std::ldexp(1.0, k));
    v.push_back(k < 10 ? 1.0 : std::pow(s.back(), 0.75));
  }
  const auto f = last_decade_fit(s, v);
  REQUIRE(f.has_value());
  CHECK(f->slope == doctest::Approx(0.75));
  CHECK(f->points == 4);  // 2^17..2^20
  const std::vector<double> one{1.0};
  CHECK_FALSE(last_decade_fit(one, one).has_value());
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(last_decade_fit(two, one), InvalidInput);
}

TEST_CASE("slope through the origin") {
  const std::vector<double> x{1, 2, 3}, y{2, 4, 6};
  CHECK(fit_slope_through_origin(x, y) == doctest::Approx(2.0));
}
