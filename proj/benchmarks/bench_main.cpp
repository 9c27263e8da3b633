#include <benchmark/benchmark.h>

#include <vector>

#include "blockade/hbt.hpp"
#include "blockade/lindblad.hpp"
#include "blockade/mcwf.hpp"
#include "blockade/model.hpp"
#include "blockade/rng.hpp"

namespace {

using namespace blockade;

const SystemParams kCw{0.0, 1.0, 0.05, 0.005, 1.5707963267948966};

void BM_BandedStep(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  BandedStepper stepper(dim, kCw.delta, kCw.kappa, kCw.theta, 0.005);
  RandomStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stepper.step(kCw.drive_E, kCw.parametric_U, rng.uniform(), 0.01));
  }
}
BENCHMARK(BM_BandedStep)->Arg(6)->Arg(10)->Arg(16);

void BM_DenseStep(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const OperatorMatrix h_eff = effective_hamiltonian(build_hamiltonian(kCw, dim), kCw.kappa);
  StateVector psi = StateVector::vacuum(dim);
  RandomStream rng(1, 0);
  for (auto _ : state) {
    psi = mcwf_step(psi, h_eff, 0.005, rng.uniform()).state;
    benchmark::DoNotOptimize(psi);
  }
}
BENCHMARK(BM_DenseStep)->Arg(10);

void BM_Uniform(benchmark::State& state) {
  RandomStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_Uniform);

void BM_PulsedTrajectory(benchmark::State& state) {
  PulseTrain train;
  train.pulse_count = 100;
  train.center_t0 = 0.5 * train.period;
  PulsedDrive drive{SystemParams{0.0, 1.0, 0.0, 0.0, 1.5707963267948966}, train};
  TrajectoryConfig config;
  config.duration = train.end_time();
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(drive, config, stream++));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(config.step_count()));
}
BENCHMARK(BM_PulsedTrajectory)->Unit(benchmark::kMillisecond);

void BM_PulsedBatch(benchmark::State& state) {
  PulseTrain train;
  train.pulse_count = 100;
  train.center_t0 = 0.5 * train.period;
  PulsedDrive drive{SystemParams{0.0, 1.0, 0.0, 0.0, 1.5707963267948966}, train};
  TrajectoryConfig config;
  config.duration = train.end_time();
  std::vector<std::uint64_t> streams(kBatchLanes);
  for (auto _ : state) {
    for (auto& s : streams) s += kBatchLanes;
    benchmark::DoNotOptimize(run_trajectory_batch(drive, config, streams));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(config.step_count() * kBatchLanes));
}
BENCHMARK(BM_PulsedBatch)->Unit(benchmark::kMillisecond);

void BM_SteadyState(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cw_steady_state(kCw, dim));
}
BENCHMARK(BM_SteadyState)->Arg(6)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Histogram(benchmark::State& state) {
  RandomStream rng(3, 0);
  EmissionRecord rec;
  rec.duration = 1e6;
  double t = 0.0;
  while (true) {
    t += 50.0 * rng.uniform();
    if (t >= rec.duration) break;
    rec.click_times.push_back(t);
  }
  const std::vector<EmissionRecord> records{rec};
  for (auto _ : state) benchmark::DoNotOptimize(build_histogram(records, 0.5, 48.0));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(rec.click_times.size()));
}
BENCHMARK(BM_Histogram);

}  // namespace

BENCHMARK_MAIN();
