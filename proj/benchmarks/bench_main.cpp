#include <benchmark/benchmark.h>

#include "twochoices/birth_death.hpp"
#include "twochoices/dynamics.hpp"
#include "twochoices/graph.hpp"
#include "twochoices/spectral.hpp"

namespace tc = twochoices;

namespace {

// Events per second on a sparse graph; no stop level, fixed horizon.
void BM_SimulateRegular(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tc::Graph g = tc::random_regular(n, 10, 7);
  tc::SimConfig cfg;
  cfg.alpha = 0.3;
  cfg.t_max = 10.0;
  std::uint64_t events = 0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    const auto rec = tc::run(g, tc::OpinionState::zeros(n), cfg);
    events += rec.events;
    benchmark::DoNotOptimize(rec.final_ones);
  }
  state.counters["events/s"] =
      benchmark::Counter(double(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateRegular)->Arg(1024)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_SimulateComplete(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tc::Graph g = tc::complete_graph(n);
  tc::SimConfig cfg;
  cfg.alpha = 0.3;
  cfg.t_max = 10.0;
  std::uint64_t events = 0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    const auto rec = tc::run(g, tc::OpinionState::zeros(n), cfg);
    events += rec.events;
  }
  state.counters["events/s"] =
      benchmark::Counter(double(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateComplete)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Transient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rates = tc::complete_rates(n, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tc::transient(rates, 0, 50.0));
  }
}
BENCHMARK(BM_Transient)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_MixingTime(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rates = tc::complete_rates(n, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tc::mixing_time(rates));
  }
}
BENCHMARK(BM_MixingTime)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SpectralDense(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const tc::Graph g = tc::random_regular(n, 10, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tc::spectral_summary(g));
  }
}
BENCHMARK(BM_SpectralDense)->Arg(256)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
