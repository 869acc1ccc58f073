// OpenMP kernels against their serial references.
//
//   TOOL_THREADS=4 ./bench_parallel --benchmark_min_time=0.5

#include <benchmark/benchmark.h>

#include "pftube/bootstrap.hpp"
#include "pftube/parallel.hpp"

namespace {

using namespace pftube;

PairedDataset ou_data(Index m) {
  return simulate_pairs(SdeModel::ornstein_uhlenbeck(1.0, 1.0), GaussianInit{0.5, 2.0}, 0.1, m, 1e-3, 42);
}

void BM_GramParallel(benchmark::State& state) {
  const auto d = ou_data(state.range(0));
  const auto spec = KernelSpec::gaussian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gram(d.x, d.x, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_GramSerial(benchmark::State& state) {
  const auto d = ou_data(state.range(0));
  const auto spec = KernelSpec::gaussian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(gram_serial(d.x, d.x, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_BootstrapShared(benchmark::State& state) {
  const auto d = ou_data(state.range(0));
  const auto spec = KernelSpec::gaussian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_deviation_quantile(d, 0.01, spec, 20, 0.05, 1));
}

void BM_BootstrapRefit(benchmark::State& state) {
  const auto d = ou_data(state.range(0));
  const auto spec = KernelSpec::gaussian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_deviation_quantile_reference(d, 0.01, spec, 20, 0.05, 1));
}

void BM_RkhsNorm(benchmark::State& state) {
  const auto d = ou_data(state.range(0));
  const auto e = embed_sample(d.x);
  const auto spec = KernelSpec::gaussian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(rkhs_norm(e, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_GramParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapShared)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapRefit)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RkhsNorm)->Arg(10000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
