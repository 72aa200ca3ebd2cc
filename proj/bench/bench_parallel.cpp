#include <benchmark/benchmark.h>

#include <vector>

#include "hpk/kernels.hpp"
#include "hpk/parallel.hpp"
#include "hpk/sampling.hpp"

namespace {

std::vector<double> grid(int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(0.05 + 3.0 * i / n);
  return g;
}

void BM_KernelTableSerial(benchmark::State& st) {
  const hpk::FiniteKernel k(hpk::HPParam::make(0.5), static_cast<int>(st.range(0)));
  const auto g = grid(100);
  for (auto _ : st) benchmark::DoNotOptimize(hpk::par::kernel_table_serial(k, g));
}

void BM_KernelTableParallel(benchmark::State& st) {
  const hpk::FiniteKernel k(hpk::HPParam::make(0.5), static_cast<int>(st.range(0)));
  const auto g = grid(100);
  for (auto _ : st) benchmark::DoNotOptimize(hpk::par::kernel_table_parallel(k, g, hpk::par::max_threads()));
}

void BM_SampleBatchSerial(benchmark::State& st) {
  const hpk::FiniteKernel k(hpk::HPParam::make(0.0), static_cast<int>(st.range(0)));
  const hpk::ProjectionSampler sampler(k, hpk::SamplerConfig{});
  for (auto _ : st) benchmark::DoNotOptimize(hpk::par::sample_batch_serial(sampler, 1, 32));
}

void BM_SampleBatchParallel(benchmark::State& st) {
  const hpk::FiniteKernel k(hpk::HPParam::make(0.0), static_cast<int>(st.range(0)));
  const hpk::ProjectionSampler sampler(k, hpk::SamplerConfig{});
  for (auto _ : st)
    benchmark::DoNotOptimize(hpk::par::sample_batch_parallel(sampler, 1, 32, hpk::par::max_threads()));
}

}  // namespace

BENCHMARK(BM_KernelTableSerial)->Arg(8)->Arg(32);
BENCHMARK(BM_KernelTableParallel)->Arg(8)->Arg(32);
BENCHMARK(BM_SampleBatchSerial)->Arg(8)->Arg(32);
BENCHMARK(BM_SampleBatchParallel)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
