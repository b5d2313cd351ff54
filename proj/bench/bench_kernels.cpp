// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "sitealloc/coverage.hpp"
#include "sitealloc/equity.hpp"
#include "sitealloc/ingest.hpp"
#include "sitealloc/search.hpp"

namespace {

using namespace sitealloc;

SynthRegion county(std::size_t rows, std::size_t cols, std::size_t sites) {
  SynthParams p;
  p.rows = rows;
  p.cols = cols;
  p.site_count = sites;
  p.segregation = 0.8;
  p.seed = 7;
  return synth_region(p);
}

void BM_CoverageSerial(benchmark::State& state) {
  const auto s = county(40, 50, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_coverage_matrix_serial(s.region, s.sites, 0.1));
}

void BM_CoverageParallel(benchmark::State& state) {
  const auto s = county(40, 50, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_coverage_matrix(s.region, s.sites, 0.1));
}

SubsetFitness equity_fitness(const SynthRegion& s, const CoverageStack& stack) {
  return [&s, &stack](std::span<const std::size_t> sel) {
    const auto e = covered_indicators(stack, sel);
    return 1e-2 * static_cast<double>(coverage_score(e)) - equity_score(s.region, e).total;
  };
}

void BM_EnumerateSerial(benchmark::State& state) {
  const auto s = county(6, 10, 25);
  const auto stack = build_coverage_stack(s.region, s.sites, 0.1);
  const auto f = equity_fitness(s, stack);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_best_serial(25, static_cast<std::size_t>(state.range(0)), f));
}

void BM_EnumerateParallel(benchmark::State& state) {
  const auto s = county(6, 10, 25);
  const auto stack = build_coverage_stack(s.region, s.sites, 0.1);
  const auto f = equity_fitness(s, stack);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_best(25, static_cast<std::size_t>(state.range(0)), f));
}

void run_ga(benchmark::State& state, bool parallel) {
  const auto s = county(20, 30, 100);
  const auto stack = build_coverage_stack(s.region, s.sites, 0.1);
  const auto f = equity_fitness(s, stack);
  GaParams params;
  params.generations = 50;
  GaHooks hooks;
  hooks.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(ga_maximize(100, 10, params, f, hooks));
}

void BM_GaSerial(benchmark::State& state) { run_ga(state, false); }
void BM_GaParallel(benchmark::State& state) { run_ga(state, true); }

}  // namespace

BENCHMARK(BM_CoverageSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerateParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
