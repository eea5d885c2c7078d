#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "edm/analysis.hpp"
#include "edm/sde.hpp"
#include "edm/simulation.hpp"

namespace {

void BM_WorldStep(benchmark::State& state) {
  edm::SimConfig config;
  config.n_agents = static_cast<int>(state.range(0));
  config.max_links = 3;
  config.initial_links = 0;
  config.t_total = 1e6;
  edm::World world(config);
  edm::SpikeLog log;
  std::vector<edm::RewireEvent> rewires;
  for (auto _ : state) {
    world.step(log, rewires);
    if (log.spikes.size() > 100000) {
      log.spikes.clear();
      log.snapshots.clear();
      rewires.clear();
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WorldStep)->Arg(10)->Arg(50)->Arg(200);

void BM_CorrelatedNoise(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const double col = state.range(1) == 0 ? 0.3 : -0.5 / (n - 1);
  edm::CorrelatedNoise noise(n, col);
  edm::Rng rng(1);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto _ : state) {
    noise.draw(0.01, rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_CorrelatedNoise)->Args({10, 0})->Args({10, 1})->Args({200, 0})->Args({200, 1});

void BM_PowerLawFit(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> sizes(static_cast<std::size_t>(state.range(0)));
  for (auto& z : sizes) z = std::floor(std::pow(1.0 - u(rng), -1.0 / 1.5));
  for (auto _ : state) benchmark::DoNotOptimize(edm::fit_power_law(sizes));
}
BENCHMARK(BM_PowerLawFit)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
