#include <benchmark/benchmark.h>

#include "cac/des_simulator.hpp"
#include "cac/scenario.hpp"

namespace {

void BM_Replication(benchmark::State& state) {
  const auto sc = cac::load_scenario(std::string(CAC_SCENARIO_DIR) + "/table1.json");
  cac::sim::SimConfig cfg;
  cfg.mix = sc.mix;
  cfg.cell = sc.cell_at(0.6);
  cfg.policy = state.range(0) == 0 ? cac::SchemePolicy::proposed() : cac::SchemePolicy::hard();
  cfg.horizon = 1e4;
  cfg.warmup = 1e3;
  std::uint64_t seed = 1;
  std::int64_t events = 0;
  for (auto _ : state) {
    const auto r = cac::sim::run_replication(cfg, seed++);
    events += static_cast<std::int64_t>(r.counts.offered_new + r.counts.offered_handover);
  }
  state.counters["arrivals/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Replication)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
