#include <benchmark/benchmark.h>

#include <complex>

#include "cqwave/bem.hpp"
#include "cqwave/coupled.hpp"
#include "cqwave/cq.hpp"
#include "cqwave/fem.hpp"
#include "cqwave/genfun.hpp"
#include "cqwave/mesh.hpp"
#include "cqwave/specfun.hpp"

namespace {

using namespace cqwave;

void BM_BesselK0(benchmark::State& state) {
  Complex z{1.3, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_K0(z));
    z += Complex{1e-9, 1e-9};
  }
}
BENCHMARK(BM_BesselK0);

void BM_CalderonAssembly(benchmark::State& state) {
  const BoundarySpaces sp =
      make_circle_spaces(static_cast<int>(state.range(0)), 1.0);
  const Complex s{2.0, 5.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_calderon(s, sp, BemQuadrature{}));
}
BENCHMARK(BM_CalderonAssembly)->Arg(32)->Arg(64);

void BM_BlockWeights(benchmark::State& state) {
  const BoundarySpaces sp = make_circle_spaces(16, 1.0);
  const GeneratingFunction g = bdf2();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    BlockWeights w = block_weights(
        [&sp](Complex s) { return assemble_calderon(s, sp, {}).blocks; }, g,
        default_contour(n, 0.05));
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_BlockWeights)->Arg(16)->Arg(32);

void BM_CoupledStep(benchmark::State& state) {
  const TriangleMesh mesh = generate_disk(3.0, 2);
  ProblemData data;
  data.u0.value = [](Point2 x) {
    return std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
  };
  data.u0.grad = [](Point2 x) {
    const double e = std::exp(-2.0 * (x[0] * x[0] + x[1] * x[1]));
    return Eigen::Vector2d(-4.0 * x[0] * e, -4.0 * x[1] * e);
  };
  auto [sys, init] = initialize(mesh, CoefficientField{}, data, bdf2(), 4.0);
  TimeState state0 = init;
  for (auto _ : state) {
    if (state0.n >= sys.n_steps) {
      state.PauseTiming();
      state0 = init;
      state.ResumeTiming();
    }
    step(sys, state0, data);
  }
}
BENCHMARK(BM_CoupledStep);

}  // namespace

BENCHMARK_MAIN();
