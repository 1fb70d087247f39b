#include <benchmark/benchmark.h>

#include "kscheck/peres.hpp"
#include "kscheck/quantum.hpp"
#include "kscheck/solver.hpp"

using namespace kscheck;

namespace {

void BM_BuildConfiguration(benchmark::State& state) {
  for (auto _ : state) {
    PeresConfiguration config = build_peres_configuration();
    benchmark::DoNotOptimize(config);
  }
}
BENCHMARK(BM_BuildConfiguration);

void BM_Search101(benchmark::State& state) {
  const ColoringConstraints constraints =
      constraints_from_configuration(build_peres_configuration());
  for (auto _ : state) {
    SearchResult result = search_101(constraints, SearchOptions{.certify = true});
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_Search101);

void BM_VerifyCertificate(benchmark::State& state) {
  const ColoringConstraints constraints =
      constraints_from_configuration(build_peres_configuration());
  const SearchResult result =
      search_101(constraints, SearchOptions{.certify = true});
  for (auto _ : state) {
    VerificationResult verdict =
        verify_certificate(constraints, *result.certificate);
    benchmark::DoNotOptimize(verdict);
  }
}
BENCHMARK(BM_VerifyCertificate);

void BM_JointDistribution(benchmark::State& state) {
  const PeresConfiguration config = build_peres_configuration();
  const TripleDirections frame = triple_directions(config, 7);
  const std::array<double, 3> w = config.rays[20].to_unit();
  for (auto _ : state) {
    OutcomeDistribution distribution = joint_distribution(frame.unit, w);
    benchmark::DoNotOptimize(distribution);
  }
}
BENCHMARK(BM_JointDistribution);

void BM_SampleRun(benchmark::State& state) {
  const PeresConfiguration config = build_peres_configuration();
  const TripleDirections frame = triple_directions(config, 7);
  const std::array<double, 3> w = config.rays[20].to_unit();
  const std::int64_t runs = state.range(0);
  for (auto _ : state) {
    SampleReport report = sample_run(frame.unit, w, runs, 42);
    benchmark::DoNotOptimize(report);
  }
  state.SetItemsProcessed(state.iterations() * runs);
}
BENCHMARK(BM_SampleRun)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
