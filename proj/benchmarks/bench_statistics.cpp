#include <benchmark/benchmark.h>

#include <random>

#include "phasestat/amplitude.hpp"
#include "phasestat/distributions.hpp"
#include "phasestat/hypothesis.hpp"

namespace {

phasestat::ComplexSample random_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<phasestat::ComplexObservation> xs;
  for (std::size_t i = 0; i < n; ++i) xs.emplace_back(z(gen) + 0.3, z(gen));
  return phasestat::ComplexSample(std::move(xs));
}

void BM_T2circOneSample(benchmark::State& state) {
  const auto s = random_sample(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::t2circ_one_sample(s));
}
BENCHMARK(BM_T2circOneSample)->Arg(10)->Arg(100)->Arg(1000);

void BM_T2OneSample(benchmark::State& state) {
  const auto s = random_sample(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::t2_one_sample(s));
}
BENCHMARK(BM_T2OneSample)->Arg(10)->Arg(100)->Arg(1000);

void BM_Anova2circRepeated(benchmark::State& state) {
  std::vector<phasestat::ComplexSample> groups;
  for (int k = 0; k < 7; ++k) groups.push_back(random_sample(static_cast<std::size_t>(state.range(0)), 10 + k));
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::anova2circ_repeated(groups));
}
BENCHMARK(BM_Anova2circRepeated)->Arg(20)->Arg(100);

void BM_ManovaOneway(benchmark::State& state) {
  std::vector<phasestat::ComplexSample> groups;
  for (int k = 0; k < 3; ++k) groups.push_back(random_sample(static_cast<std::size_t>(state.range(0)), 20 + k));
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::manova_oneway(groups));
}
BENCHMARK(BM_ManovaOneway)->Arg(10)->Arg(100);

void BM_CiCdf(benchmark::State& state) {
  const phasestat::ConditionIndexDensity density{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::ci_cdf(1.7, density));
}
BENCHMARK(BM_CiCdf)->Arg(4)->Arg(64);

void BM_CiQuantile(benchmark::State& state) {
  const phasestat::ConditionIndexDensity density{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::ci_quantile(0.95, density));
}
BENCHMARK(BM_CiQuantile)->Arg(4)->Arg(64);

void BM_FSurvival(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::f_sf(3.7, {2, 18}));
}
BENCHMARK(BM_FSurvival);

void BM_EllipseErrors(benchmark::State& state) {
  const auto s = random_sample(20, 3);
  for (auto _ : state) benchmark::DoNotOptimize(phasestat::amp_errors_ellipse(s, 0.68));
}
BENCHMARK(BM_EllipseErrors);

void BM_Bootstrap(benchmark::State& state) {
  const auto s = random_sample(20, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phasestat::amp_ci_bootstrap(s, 0.95, static_cast<std::size_t>(state.range(0)), 7));
  }
}
BENCHMARK(BM_Bootstrap)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
