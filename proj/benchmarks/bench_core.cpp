#include "tslto/datagen.hpp"
#include "tslto/prox.hpp"
#include "tslto/solver.hpp"
#include "tslto/stiefel.hpp"

#include <benchmark/benchmark.h>

using namespace tslto;

namespace {

Tensor3 noise_tensor(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Tensor3 x({n, n, n});
  for (Index i = 0; i < x.size(); ++i) x[i] = rng.normal(0.0, 1.0);
  return x;
}

SyntheticInstance instance(Index n) {
  SyntheticSpec spec;
  spec.dims = {n, n, n};
  spec.blocks.cols = n * 5 / 2;
  spec.blocks.count = n;
  spec.missing_rate = 0.3;
  spec.seed = 1;
  return generate(spec);
}

void BM_ModeProduct(benchmark::State& state) {
  const Index n = state.range(0);
  const Tensor3 x = noise_tensor(n, 1);
  const Matrix u = Matrix::Random(n, 3);
  const int mode = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mode_n_product_transposed(x, u, mode));
}
BENCHMARK(BM_ModeProduct)->ArgsProduct({{50, 100}, {1, 2, 3}});

void BM_TuckerReconstruct(benchmark::State& state) {
  const Index n = state.range(0);
  const TuckerFactors tf = hosvd(noise_tensor(n, 2), {3, 3, 3});
  for (auto _ : state) benchmark::DoNotOptimize(tucker_reconstruct(tf.core, tf.factors));
}
BENCHMARK(BM_TuckerReconstruct)->Arg(50)->Arg(100);

void BM_Hosvd(benchmark::State& state) {
  const Tensor3 x = noise_tensor(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(hosvd(x, {3, 3, 3}));
}
BENCHMARK(BM_Hosvd)->Arg(50)->Arg(100);

void BM_BlockDiff(benchmark::State& state) {
  const Tensor3 x = noise_tensor(state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(block_diff(x));
}
BENCHMARK(BM_BlockDiff)->Arg(50)->Arg(100);

void BM_HardThreshold(benchmark::State& state) {
  const Tensor3 x = noise_tensor(state.range(0), 5);
  for (auto _ : state) benchmark::DoNotOptimize(hard_threshold_l0(x, ProxWeight(0.5)));
}
BENCHMARK(BM_HardThreshold)->Arg(50)->Arg(100);

void BM_FactorUpdate(benchmark::State& state) {
  const SyntheticInstance inst = instance(state.range(0));
  SolverConfig cfg;
  const SolverState st =
      init_state(project_observed(inst.full, inst.observed), inst.observed, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(update_factors(st, cfg));
}
BENCHMARK(BM_FactorUpdate)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_OuterIterations(benchmark::State& state) {
  const SyntheticInstance inst = instance(state.range(0));
  const Tensor3 observed = project_observed(inst.full, inst.observed);
  SolverConfig cfg;
  cfg.max_outer = 10;
  cfg.epsilon = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(solve(observed, inst.observed, cfg));
  state.SetItemsProcessed(state.iterations() * cfg.max_outer);
}
BENCHMARK(BM_OuterIterations)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
