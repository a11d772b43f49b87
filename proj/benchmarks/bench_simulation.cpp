#include <benchmark/benchmark.h>

#include <random>

#include "phasestat/cluster.hpp"
#include "phasestat/simulation.hpp"

namespace {

void BM_SimulateCell(benchmark::State& state) {
  phasestat::SimulationSpec spec;
  spec.generator.n = 10;
  spec.generator.k = state.range(0) == 0 ? 1 : 3;
  spec.test = state.range(0) == 0 ? phasestat::SimTest::t2circ : phasestat::SimTest::manova;
  spec.n_reps = 1000;
  spec.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::simulate_cell(spec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spec.n_reps));
}
BENCHMARK(BM_SimulateCell)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ClusterCorrect(benchmark::State& state) {
  const std::size_t nodes = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  std::vector<phasestat::GroupedDataset> data;
  for (std::size_t i = 0; i < nodes; ++i) {
    std::vector<phasestat::ComplexObservation> xs;
    for (int j = 0; j < 16; ++j) xs.emplace_back(z(gen) + (i < 3 ? 1.0 : 0.0), z(gen));
    data.emplace_back(std::vector<phasestat::ComplexSample>{phasestat::ComplexSample(xs)},
                      phasestat::Design::one_sample);
  }
  phasestat::AdjacencyGraph graph{nodes, {}};
  for (std::size_t i = 0; i + 1 < nodes; ++i) graph.edges.emplace_back(i, i + 1);
  phasestat::ClusterOptions options;
  options.n_perm = 500;
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::cluster_correct(data, graph, options));
}
BENCHMARK(BM_ClusterCorrect)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
