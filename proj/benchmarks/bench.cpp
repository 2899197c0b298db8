#include <benchmark/benchmark.h>

#include <random>

#include "asyncdgd/config.hpp"
#include "asyncdgd/engine.hpp"
#include "asyncdgd/mixing.hpp"

using namespace asyncdgd;

namespace {

AlgorithmSpec make_bench_spec(int n, int d) {
  ExperimentConfig cfg;
  cfg.loss = "quadratic";
  cfg.n = n;
  cfg.d = d;
  cfg.samples_per_node = d + 2;
  cfg.graph_kind = "random";
  cfg.edges = n + n / 2;
  cfg.stepsize_rule = "fraction";
  cfg.stepsize_value = 0.5;
  return build_spec(cfg, false);
}

void BM_apply_T_full(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  AlgorithmSpec spec = make_bench_spec(n, 8);
  BlockVector x(n, 8);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (Eigen::Index t = 0; t < x.flat().size(); ++t) x.flat()[t] = g(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_T_full(spec, x));
  }
}
BENCHMARK(BM_apply_T_full)->Arg(8)->Arg(32)->Arg(128);

void BM_simulate(benchmark::State& state) {
  const int n = 16;
  AlgorithmSpec spec = make_bench_spec(n, 4);
  Schedule sched = gen_partial_async(spec.graph, 2 * n, n, 5000, 3);
  BlockVector x0(n, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(spec, sched, x0, TraceOptions{}));
  }
}
BENCHMARK(BM_simulate);

void BM_metropolis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Graph g = random_connected_graph(n, 2 * n, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metropolis_weights(g));
  }
}
BENCHMARK(BM_metropolis)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
