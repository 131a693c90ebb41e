#include "ssalt/bootstrap.hpp"
#include "ssalt/io.hpp"
#include "ssalt/robustness.hpp"
#include "ssalt/simulation.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace ssalt;

const SimulationScenario& scenario() {
  static const SimulationScenario s = load_scenario(std::string(SSALT_DATA_DIR) + "/simulation_scenario.txt");
  return s;
}

const Dataset& devices() {
  static const Dataset d = load_dataset(std::string(SSALT_DATA_DIR) + "/electronic_devices.txt");
  return d;
}

void BM_EvaluateCells(benchmark::State& state) {
  const auto& s = scenario();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_cells(s.true_params, s.design));
}
BENCHMARK(BM_EvaluateCells);

void BM_Fit(benchmark::State& state) {
  const auto& s = scenario();
  Rng rng = make_stream(1, 0);
  const CountData data = simulate_dataset(s.true_params, s.design, s.N, rng);
  const double beta = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(fit(data, s.design, beta));
}
BENCHMARK(BM_Fit)->Arg(0)->Arg(5)->Arg(10);

void BM_SimulateDataset(benchmark::State& state) {
  const auto& s = scenario();
  Rng rng = make_stream(2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_dataset(s.true_params, s.design, s.N, rng));
}
BENCHMARK(BM_SimulateDataset);

void BM_SensitivityCurve(benchmark::State& state) {
  const auto& s = scenario();
  const std::vector<double> betas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(sensitivity_curve(s.true_params, s.design, betas, SensitivityKind::self_standardized));
}
BENCHMARK(BM_SensitivityCurve);

void BM_BcaDevices(benchmark::State& state) {
  const auto& d = devices();
  BootstrapConfig config;
  config.B = static_cast<int>(state.range(0));
  config.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bca_interval(d.data, d.design, 0.0, config));
}
BENCHMARK(BM_BcaDevices)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_StudyReplications(benchmark::State& state) {
  SimulationScenario s = scenario();
  s.replications = static_cast<int>(state.range(0));
  s.contamination_fraction = 0.1;
  s.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_mse_study(s));
}
BENCHMARK(BM_StudyReplications)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
