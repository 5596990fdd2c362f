#include <benchmark/benchmark.h>

#include <vector>

#include "contagion/dynamics.hpp"
#include "contagion/graph.hpp"
#include "contagion/kernels.hpp"

using namespace contagion;

namespace {

const WeightedGraph& graph(std::size_t n) {
  static std::vector<std::pair<std::size_t, WeightedGraph>> cache;
  for (const auto& [size, g] : cache) {
    if (size == n) return g;
  }
  cache.emplace_back(n, build_network(n, 2, 10, 1));
  return cache.back().second;
}

// Half-active state for the per-step kernels.
CascadeState half_active(const WeightedGraph& g, const SimParams& p) {
  const NodeId seed[1] = {0};
  CascadeState s(g, seed, p);
  std::vector<std::uint8_t> active(g.node_count());
  for (std::size_t v = 0; v < active.size(); v += 2) active[v] = 1;
  s.assign_active(active);
  return s;
}

template <class Kernel>
void step_probs(benchmark::State& state, Kernel kernel) {
  const WeightedGraph& g = graph(std::size_t(state.range(0)));
  SimParams p;
  CascadeState s = half_active(g, p);
  const NodeId seed[1] = {0};
  Propagation c = self_propagation(g, seed);
  for (auto _ : state) benchmark::DoNotOptimize(kernel(s, c, g, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StepProbsScalar(benchmark::State& state) { step_probs(state, step_probs_scalar); }
void BM_StepProbsParallel(benchmark::State& state) { step_probs(state, step_probs_parallel); }
void BM_StepProbsMatrix(benchmark::State& state) { step_probs(state, step_probs_matrix); }

void batch(benchmark::State& state, Execution exec) {
  const WeightedGraph& g = graph(1000);
  SimParams p;
  std::vector<CascadeJob> jobs;
  for (std::size_t i = 0; i < std::size_t(state.range(0)); ++i) {
    const NodeId v = NodeId(i % 1000);
    const NodeId seed[1] = {v};
    jobs.push_back({self_propagation(g, seed), {v}, derive_seed(1, "bench", i)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(run_batch(g, jobs, p, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RunBatchSerial(benchmark::State& state) { batch(state, Execution::Serial); }
void BM_RunBatchParallel(benchmark::State& state) { batch(state, Execution::Parallel); }

void BM_DiameterSerial(benchmark::State& state) {
  const RawGraph& g = graph(std::size_t(state.range(0))).raw();
  for (auto _ : state) benchmark::DoNotOptimize(diameter_serial(g));
}

void BM_DiameterParallel(benchmark::State& state) {
  const RawGraph& g = graph(std::size_t(state.range(0))).raw();
  for (auto _ : state) benchmark::DoNotOptimize(diameter(g));
}

}  // namespace

BENCHMARK(BM_StepProbsScalar)->Arg(1000)->Arg(4000);
BENCHMARK(BM_StepProbsParallel)->Arg(1000)->Arg(4000);
BENCHMARK(BM_StepProbsMatrix)->Arg(1000)->Arg(4000);
BENCHMARK(BM_RunBatchSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunBatchParallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiameterSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiameterParallel)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
