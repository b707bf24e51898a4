#pragma once

#include <cmath>
#include <numbers>

namespace cbmo {

/// Volume v_n of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Origin-centred ball B(0, r) in R^n.
struct Ball {
  double radius = 1.0;
  int dim = 1;

  double volume() const { return unit_ball_volume(dim) * std::pow(radius, dim); }
};

/// Origin-centred annulus {r_in <= |x| < r_out}. The dyadic ring C_k is the
/// annulus with r_in = 2^{k-1}, r_out = 2^k.
struct Annulus {
  double r_in = 0.0;
  double r_out = 1.0;
  int dim = 1;

  static Annulus dyadic_ring(int k, int dim = 1) {
    return {std::ldexp(1.0, k - 1), std::ldexp(1.0, k), dim};
  }

  double volume() const {
    return unit_ball_volume(dim) * (std::pow(r_out, dim) - std::pow(r_in, dim));
  }
};

}  // namespace cbmo
