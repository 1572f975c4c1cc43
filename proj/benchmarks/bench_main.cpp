#include <benchmark/benchmark.h>

#include "igc/igc.hpp"

using namespace igc;

namespace {

Matrix uniform(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m(i) = rng.uniform_open();
  return m;
}

std::span<const double> col(const Matrix& m, Index d) {
  return {m.col(d).data(), static_cast<std::size_t>(m.rows())};
}

void BM_Softrank(benchmark::State& state) {
  const Index m = state.range(0);
  Rng rng(1);
  const Matrix y = normal_matrix(rng, m, 2);
  const Matrix dv = uniform(m, 2, 2);
  SoftrankCache cache;
  for (auto _ : state) {
    benchmark::DoNotOptimize(softrank(y, {1000.0, true}, &cache));
    benchmark::DoNotOptimize(softrank_backward(cache, dv));
  }
  state.SetComplexityN(m);
}
BENCHMARK(BM_Softrank)->Arg(100)->Arg(200)->Arg(400)->Complexity();

void BM_EnergyLoss(benchmark::State& state) {
  const Matrix u = uniform(100, 2, 3), v = uniform(state.range(0), 2, 4);
  for (auto _ : state) benchmark::DoNotOptimize(energy_loss(u, v));
}
BENCHMARK(BM_EnergyLoss)->Arg(200)->Arg(400);

void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(5);
  const std::vector<int> hidden{100, 100};
  const auto params = GeneratorParams::glorot(6, hidden, 2, rng);
  const Matrix z = normal_matrix(rng, state.range(0), 6);
  const Matrix grad = uniform(state.range(0), 2, 6);
  ForwardCache cache;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_forward(params, z, &cache));
    benchmark::DoNotOptimize(mlp_backward(params, cache, grad));
  }
}
BENCHMARK(BM_MlpForwardBackward)->Arg(200)->Arg(16384);

void BM_TrainEpoch(benchmark::State& state) {
  const Matrix u = pseudo_observations(sample_clayton(3.0, Rotation::r0, 1000, 7));
  TrainConfig config;
  config.epochs = 1;
  config.marginal_samples = 10000;
  for (auto _ : state) benchmark::DoNotOptimize(train(u, config));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_KendallTau(benchmark::State& state) {
  const Matrix x = sample_gumbel(2.0, Rotation::r0, state.range(0), 8);
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(col(x, 0), col(x, 1)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(10)->Range(1000, 100000)->Complexity(benchmark::oNLogN);

void BM_Ise(benchmark::State& state) {
  const Matrix data = uniform(1000, state.range(1), 9);
  const Matrix model = uniform(state.range(0), state.range(1), 10);
  for (auto _ : state) benchmark::DoNotOptimize(ise(data, model));
}
BENCHMARK(BM_Ise)->Args({10000, 2})->Args({100000, 2})->Args({10000, 3})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
