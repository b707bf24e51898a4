#include <benchmark/benchmark.h>

#include <cmath>

#include "cbmo/norms.hpp"
#include "cbmo/operators.hpp"
#include "cbmo/quadrature.hpp"
#include "cbmo/spaces.hpp"

namespace {

using namespace cbmo;

void BM_IntegrateInterval(benchmark::State& state) {
  const double a = -0.25;
  for (auto _ : state) {
    auto r = integrate_interval([a](double x) { return std::pow(x, a); }, 0.0, 1.0, {});
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_IntegrateInterval);

void BM_LuxemburgConstant(benchmark::State& state) {
  const Func f = Func::chi_interval(0.0, 2.0) + 0.5 * Func::power(-0.25);
  const Exponent e = Exponent::constant(2.0);
  const Domain d = Domain::ball(4.0);
  for (auto _ : state) benchmark::DoNotOptimize(luxemburg_norm(f, e, d).value);
}
BENCHMARK(BM_LuxemburgConstant);

void BM_LuxemburgPiecewise(benchmark::State& state) {
  const Func f = Func::chi_interval(0.0, 2.0);
  const Exponent e = Exponent::piecewise({1.0}, {2.0, 3.0});
  for (auto _ : state) benchmark::DoNotOptimize(luxemburg_norm(f, e, Domain::full()).value);
}
BENCHMARK(BM_LuxemburgPiecewise);

void BM_CommutatorSample(benchmark::State& state) {
  const Func b = Func::sign();
  const Func f = Func::chi_ball(1.0);
  double x = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(commutator_dual_hardy(b, f, x).value);
    x = x < 3.0 ? x * 1.1 : 0.3;
  }
}
BENCHMARK(BM_CommutatorSample);

void BM_Maximal(benchmark::State& state) {
  const Func f = Func::chi_interval(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(maximal(f, 2.5).value);
}
BENCHMARK(BM_Maximal);

void BM_CbmoVarDyadicStep(benchmark::State& state) {
  const Func f = Func::dyadic_step(40);
  const Exponent e = Exponent::constant(2.0);
  const auto grid = dyadic_radius_grid(-10, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cbmo_var_norm(f, e, grid).value);
}
BENCHMARK(BM_CbmoVarDyadicStep)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_HerzRings(benchmark::State& state) {
  const Func f = Func::chi_annulus(0.5, 3.0) + Func::with_sign(Func::chi_ball(0.25));
  const Exponent e = Exponent::constant(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(herz_rings(f, e, -20, 20).norms.size());
}
BENCHMARK(BM_HerzRings)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
