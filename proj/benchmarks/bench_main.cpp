#include <benchmark/benchmark.h>

#include "descent/estimators.hpp"
#include "descent/experiment.hpp"
#include "descent/model.hpp"
#include "descent/spectrum.hpp"

using namespace descent;

static void BM_SvdLinearFamily(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto phi = regression_matrix(build_linear(n, 30), sample_times(10));
  for (auto _ : state) {
    auto f = svd(phi);
    benchmark::DoNotOptimize(f.singular_values.data());
  }
}
BENCHMARK(BM_SvdLinearFamily)->Arg(5)->Arg(10)->Arg(20)->Arg(30);

static void BM_SvdSquareRandomish(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ComplexMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = Complex(std::sin(1.0 + i * 7 + j), std::cos(3.0 * i - j));
  for (auto _ : state) {
    auto f = svd(m);
    benchmark::DoNotOptimize(f.singular_values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SvdSquareRandomish)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_SpectrumSweep(benchmark::State& state) {
  const auto inputs = sample_times(10);
  for (auto _ : state) {
    auto sweep = sweep_spectrum(linear_family(30), inputs, 30);
    benchmark::DoNotOptimize(sweep.sigma_min.data());
  }
}
BENCHMARK(BM_SpectrumSweep);

static void BM_RunCase(benchmark::State& state) {
  auto cfg = preset("A");
  cfg.replicates = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto result = run_case(cfg);
    benchmark::DoNotOptimize(result.linear.orders.data());
  }
}
BENCHMARK(BM_RunCase)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
