#include <benchmark/benchmark.h>

#include "spadmm/admm_engine.hpp"
#include "spadmm/market_data.hpp"
#include "spadmm/model.hpp"
#include "spadmm/oracle.hpp"
#include "spadmm/suites.hpp"

namespace {

using namespace spadmm;

PortfolioProblem bench_problem(std::size_t n) {
  SyntheticMarketSpec spec;
  spec.assets = n;
  spec.periods = 120;
  spec.seed = 42;
  const AssetStats stats = estimate_stats(generate_synthetic_returns(spec));
  return build_problem(stats, 0.5 * (stats.mu.minCoeff() + stats.mu.maxCoeff()));
}

void BM_OracleSerial(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PortfolioProblem p = bench_problem(n);
  const double lambda = initial_lambda(120, n);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_solve_serial(p, lambda));
}
BENCHMARK(BM_OracleSerial)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_OracleParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PortfolioProblem p = bench_problem(n);
  const double lambda = initial_lambda(120, n);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_solve(p, lambda));
}
BENCHMARK(BM_OracleParallel)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

// One solve per strategy on an ill-conditioned instance; iterations are
// reported as a counter next to the timing.
void BM_SolveIllConditioned(benchmark::State& state) {
  const PenaltyKind kind = kAllStrategies[state.range(0)];
  const SuiteInstance inst = make_suite_instance(Suite::IllConditioned, 0, 1, 20);
  SolverConfig cfg;
  cfg.penalty.kind = kind;
  cfg.lambda = inst.lambda;
  std::size_t iterations = 0;
  for (auto _ : state) {
    const SolveResult r = solve(inst.problem, cfg);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.objective);
  }
  state.SetLabel(std::string(to_string(kind)));
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveIllConditioned)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
