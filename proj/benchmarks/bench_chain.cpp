#include <benchmark/benchmark.h>

#include "cac/chain_analytic.hpp"
#include "cac/chain_oracle.hpp"
#include "cac/scenario.hpp"

namespace {

const cac::Scenario& reference() {
  static const cac::Scenario sc = cac::load_scenario(std::string(CAC_SCENARIO_DIR) + "/table1.json");
  return sc;
}

void BM_BuildChain(benchmark::State& state) {
  const auto& sc = reference();
  const auto cell = sc.cell_at(0.6);
  for (auto _ : state) benchmark::DoNotOptimize(cac::build_chain(sc.mix, cell, cac::SchemePolicy::proposed()));
}
BENCHMARK(BM_BuildChain);

void BM_OracleSolve(benchmark::State& state) {
  const auto& sc = reference();
  const auto chain = cac::build_chain(sc.mix, sc.cell_at(0.6), cac::SchemePolicy::proposed());
  const cac::oracle::BirthDeathSpec spec{chain.birth_rates, chain.death_rates};
  for (auto _ : state) benchmark::DoNotOptimize(cac::oracle::solve_stationary(spec));
}
BENCHMARK(BM_OracleSolve);

// Capacity scales the chain length.
void BM_BuildChainScaled(benchmark::State& state) {
  const auto& sc = reference();
  const double capacity = static_cast<double>(state.range(0));
  const double load = 0.0125 * capacity / 66.0;
  const auto cell = cac::CellParameters::from_durations(capacity, load * 2.0 / 3.0, load / 3.0, 120.0, 240.0);
  for (auto _ : state) benchmark::DoNotOptimize(cac::build_chain(sc.mix, cell, cac::SchemePolicy::proposed()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildChainScaled)->RangeMultiplier(4)->Range(1000, 256000)->Complexity();

void BM_FullSweep(benchmark::State& state) {
  const auto& sc = reference();
  const auto agg = cac::aggregates(sc.mix);
  for (auto _ : state) {
    for (const auto& policy : sc.policies)
      for (double v : sc.sweep.values) {
        const auto cell = sc.cell_at(v);
        benchmark::DoNotOptimize(cac::evaluate(cac::build_chain(sc.mix, cell, policy), agg, cell));
      }
  }
}
BENCHMARK(BM_FullSweep);

}  // namespace
