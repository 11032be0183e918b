#include <benchmark/benchmark.h>

#include "que/certifier.hpp"
#include "que/obstacle.hpp"
#include "que/spectral.hpp"

namespace {

que::FractalModel model_for(int id) { return id == 0 ? que::FractalModel::interval() : que::FractalModel::gasket(); }

void BM_BuildLevel(benchmark::State& state) {
  const auto model = model_for(static_cast<int>(state.range(0)));
  const int level = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(que::build_level(model, level));
}
BENCHMARK(BM_BuildLevel)->Args({0, 8})->Args({1, 5})->Args({1, 7})->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const auto g = que::build_level(model_for(static_cast<int>(state.range(0))), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(que::assemble(g));
}
BENCHMARK(BM_Assemble)->Args({0, 8})->Args({1, 7})->Unit(benchmark::kMillisecond);

void BM_Certify(benchmark::State& state) {
  const auto model = model_for(static_cast<int>(state.range(0)));
  const int m = static_cast<int>(state.range(1));
  const auto pair = que::build_identification(model, m, que::default_fine_level(model, m));
  for (auto _ : state) benchmark::DoNotOptimize(que::certify(pair));
}
BENCHMARK(BM_Certify)->Args({0, 3})->Args({1, 2})->Unit(benchmark::kMillisecond);

void BM_Eigensolve(benchmark::State& state) {
  const auto pencil =
      que::assemble(que::build_level(model_for(static_cast<int>(state.range(0))), static_cast<int>(state.range(1))));
  for (auto _ : state) benchmark::DoNotOptimize(que::eigensolve(pencil));
}
BENCHMARK(BM_Eigensolve)->Args({0, 8})->Args({1, 5})->Args({1, 6})->Unit(benchmark::kMillisecond);

void BM_ObstacleCertificate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int centers[] = {n / 2};
  const auto m = que::build_obstacle_model(n, centers, 8.0 / n, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(que::certify_obstacle(m));
}
BENCHMARK(BM_ObstacleCertificate)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
