#include <benchmark/benchmark.h>

#include <random>

#include <mmdual/harness.hpp>
#include <mmdual/local_step.hpp>
#include <mmdual/reference.hpp>
#include <mmdual/tcl.hpp>

using namespace mmdual;

namespace {

VectorXd random_delta(std::mt19937_64& rng, Index S, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return VectorXd::NullaryExpr(S, [&] { return u(rng); });
}

void BM_LocalSolveCold(benchmark::State& state) {
  const auto S = static_cast<Index>(state.range(0));
  const auto sc = build_scenario(1, S, 1);
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_local(sc.problem.agents[0], random_delta(rng, S, 0.05)).rho);
  }
}
BENCHMARK(BM_LocalSolveCold)->Arg(12)->Arg(30)->Arg(60);

void BM_LocalSolveWarm(benchmark::State& state) {
  const auto S = static_cast<Index>(state.range(0));
  const auto sc = build_scenario(1, S, 1);
  LocalSolver solver(sc.problem.agents[0]);
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.solve(random_delta(rng, S, 0.05)).rho);
  }
}
BENCHMARK(BM_LocalSolveWarm)->Arg(12)->Arg(30)->Arg(60);

void BM_Centralized(benchmark::State& state) {
  const auto sc = build_scenario(static_cast<std::size_t>(state.range(0)), 60, 2017);
  for (auto _ : state) benchmark::DoNotOptimize(solve_centralized(sc.problem).P_star);
}
BENCHMARK(BM_Centralized)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_HarnessRounds(benchmark::State& state) {
  const auto sc = build_scenario(20, 60, 2017);
  const Graph g = erdos_renyi(20, 0.2, 2017);
  RunConfig cfg;
  cfg.iterations = 50;
  cfg.record_every = 50;
  for (auto _ : state) benchmark::DoNotOptimize(run(sc.problem, g, cfg).report.sum_rho);
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_HarnessRounds)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
