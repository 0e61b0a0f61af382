#include <benchmark/benchmark.h>

#include "models.hpp"

using namespace rdsio;

namespace {

void BM_CellNoise(benchmark::State& state) {
  const RandomVariable u = models::uniform_cells(-1, 1, 1);
  Fiber w{7, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(u.scalar(w));
    w.offset += 1.0;
  }
}
BENCHMARK(BM_CellNoise);

void BM_GeneratorFlow(benchmark::State& state) {
  const SystemFlow sys = flow_from_generator(models::planar_noisy());
  const Process u = stationary(models::uniform_cells(-1, 1, 2), TimeKind::discrete);
  const Fiber w{3, 0.0};
  const auto n = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sys(n, w, {0.1, -0.2}, u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GeneratorFlow)->RangeMultiplier(4)->Range(4, 1024)->Complexity(benchmark::oN);

void BM_LinearSolve(benchmark::State& state) {
  const LinearCoeffs c = models::random_linear();
  const Process u = stationary(models::uniform_cells(-1, 1, 3), TimeKind::continuous);
  const Fiber w{5, 0.25};
  const auto t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve(c, t, w, 1.0, u));
}
BENCHMARK(BM_LinearSolve)->RangeMultiplier(4)->Range(4, 256);

void BM_LinearSolveSmoothInput(benchmark::State& state) {
  const LinearCoeffs c = models::random_linear();
  const Process u(1, TimeKind::continuous, [](double t, const Fiber&) { return Vec{std::sin(t)}; });
  const Fiber w{5, 0.25};
  for (auto _ : state) benchmark::DoNotOptimize(solve(c, 40.0, w, 1.0, u));
}
BENCHMARK(BM_LinearSolveSmoothInput);

void BM_Characteristic(benchmark::State& state) {
  const LinearCoeffs c = models::random_linear();
  const RandomVariable u = models::uniform_cells(-1, 1, 4);
  Fiber w{9, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(characteristic(c, u, w).value);
    w.offset += 1.0;
  }
}
BENCHMARK(BM_Characteristic);

void BM_SmallGainMap(benchmark::State& state) {
  const FeedbackLoop loop = models::contractive_loop();
  const TableMap T = compose_maps(output_characteristic_map(loop.g1, loop.h1, 40, {0.0}),
                                  output_characteristic_map(loop.g2, loop.h2, 40, {0.0}));
  const Fiber w{11, 0.0};
  const OrbitTable seed = tabulate(models::uniform_cells(-1, 1, 5), w, -state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(T(seed, w).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SmallGainMap)->Arg(1000)->Arg(6000);

void BM_AxiomCheck(benchmark::State& state) {
  const SystemFlow sys = flow_from_generator(models::affine_noisy());
  AxiomOptions o;
  o.samples = 100;
  for (auto _ : state) benchmark::DoNotOptimize(check_axioms(sys, o).passed());
}
BENCHMARK(BM_AxiomCheck)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
