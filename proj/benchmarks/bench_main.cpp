#include <cstdint>

#include <benchmark/benchmark.h>

#include "coupon/coupon.hpp"

namespace {

using namespace coupon;

void BM_LambertW0(benchmark::State& state) {
  double z = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lambert_w0(z));
    z = z < 50.0 ? z * 1.01 : 0.5;
  }
}
BENCHMARK(BM_LambertW0);

void BM_XiOfLambda(benchmark::State& state) {
  double lambda = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(xi_of_lambda(lambda));
    lambda = lambda < 10.0 ? lambda * 1.01 : 0.1;
  }
}
BENCHMARK(BM_XiOfLambda);

void BM_StirlingExact(benchmark::State& state) {
  const std::int64_t l = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(stirling_exact(2 * l, l));
}
BENCHMARK(BM_StirlingExact)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_LogDpBackend(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(StirlingBackend::log_dp(StirlingBand::for_strip(2 * n, n)));
  }
}
BENCHMARK(BM_LogDpBackend)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ExactBackend(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(StirlingBackend::exact(StirlingBand::for_strip(2 * n, n)));
  }
}
BENCHMARK(BM_ExactBackend)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_SampleConditioned(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const auto backend = StirlingBackend::log_dp(StirlingBand::for_strip(2 * n, n));
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_conditioned(2 * n, n, backend, 1, stream++));
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_SampleConditioned)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

void BM_SolveCurve(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_completion_curve(1.0, 0.1));
}
BENCHMARK(BM_SolveCurve)->Unit(benchmark::kMillisecond);

void BM_AccessibilityTrial(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_accessibility(2, 1000, 100, seed++));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_AccessibilityTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
