#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gridshed/calibrate.hpp"
#include "gridshed/storage.hpp"
#include "gridshed/sweep.hpp"

using namespace gridshed;

namespace {

SheddingSeries random_shedding(std::size_t count) {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> level(0.0, 2.5e4);
  SheddingSeries shed{TimeGrid{0, 3600, count}, std::vector<double>(count)};
  for (double& v : shed.values_mw) v = level(rng);
  return shed;
}

const EventProfile& calibrated() {
  static const EventProfile profile = calibrate_profile(CalibrationTargets{});
  return profile;
}

void bm_dispatch_peak_shave(benchmark::State& state) {
  const SheddingSeries shed = random_shedding(static_cast<std::size_t>(state.range(0)));
  StorageSpec spec;
  spec.energy_capacity_mwh = 1e4;
  spec.power_limit_mw = 5e3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dispatch_peak_shave(shed, spec));
  }
}
BENCHMARK(bm_dispatch_peak_shave)->Arg(96)->Arg(960)->Arg(9600);

void bm_dispatch_ens_offset(benchmark::State& state) {
  const SheddingSeries shed = random_shedding(static_cast<std::size_t>(state.range(0)));
  StorageSpec spec;
  spec.energy_capacity_mwh = 5e4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dispatch_ens_offset(shed, spec));
  }
}
BENCHMARK(bm_dispatch_ens_offset)->Arg(96)->Arg(960)->Arg(9600);

void bm_sweep_50x50(benchmark::State& state) {
  const EventProfile& profile = calibrated();
  std::vector<double> rhos, energies;
  for (int i = 0; i < 50; ++i) {
    rhos.push_back(i * 0.4 / 49.0);
    energies.push_back(i * 4000.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_peak_shave_vs_storage(profile, rhos, energies));
  }
}
BENCHMARK(bm_sweep_50x50);

void bm_calibrate(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate_profile(CalibrationTargets{}));
  }
}
BENCHMARK(bm_calibrate);

}  // namespace

BENCHMARK_MAIN();
