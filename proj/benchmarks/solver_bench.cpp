#include <benchmark/benchmark.h>

#include "rbanova/fem.hpp"
#include "rbanova/random_field.hpp"
#include "rbanova/rng.hpp"

namespace {

using namespace rbanova;

void BM_FullSolve(benchmark::State& state) {
  const UniformGrid grid(static_cast<int>(state.range(0)));
  const KlExpansion kl = build_kl({0.25, 5.0}, grid, 0.95);
  const AffineOperatorFamily ops = assemble_affine(grid, kl);
  FullSolver solver(ops);
  Rng rng(1, "bench");
  for (auto _ : state) {
    Eigen::VectorXd u = solver.solve(0.5 * rng.uniform_box(kl.n_modes()));
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_FullSolve)->Arg(16)->Arg(32)->Arg(64);

void BM_Assembly(benchmark::State& state) {
  const UniformGrid grid(static_cast<int>(state.range(0)));
  const KlExpansion kl = build_kl({0.25, 5.0}, grid, 0.95);
  for (auto _ : state) {
    AffineOperatorFamily ops = assemble_affine(grid, kl);
    benchmark::DoNotOptimize(ops);
  }
}
BENCHMARK(BM_Assembly)->Arg(16)->Arg(32);

void BM_KlEigensolve(benchmark::State& state) {
  const UniformGrid grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    KlExpansion kl = build_kl({0.25, 1.25}, grid, 0.95);
    benchmark::DoNotOptimize(kl);
  }
}
BENCHMARK(BM_KlEigensolve)->Arg(16)->Arg(64);

}  // namespace
