// Serial reference vs OpenMP field update, and a short episode per planner.
#include <benchmark/benchmark.h>

#include "fipp/flowfield.hpp"
#include "fipp/sim.hpp"

namespace {

fipp::FlowField seeded_field(int cells_per_side) {
  const fipp::Scenario sc = fipp::generate_scenario(fipp::ScenarioKind::intersection, 50, 7);
  fipp::GridSpec spec;
  spec.origin = sc.bounds.min;
  spec.cell_size = sc.bounds.width() / cells_per_side;
  spec.width = spec.height = cells_per_side;
  fipp::FlowParams params;
  fipp::FlowField field(spec);
  for (const auto& frame : fipp::record_crowd(sc, 5.0, 0.1)) fipp::deposit_frame(field, frame, params);
  return field;
}

void BM_UpdateSerial(benchmark::State& state) {
  fipp::FlowField field = seeded_field(static_cast<int>(state.range(0)));
  fipp::FlowParams params;
  params.h = 2.0 * field.spec.cell_size;
  for (auto _ : state) {
    fipp::update_field_serial(field, params);
    benchmark::DoNotOptimize(field.cells.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(field.cells.size()));
}

void BM_UpdateParallel(benchmark::State& state) {
  fipp::FlowField field = seeded_field(static_cast<int>(state.range(0)));
  fipp::FlowParams params;
  params.h = 2.0 * field.spec.cell_size;
  for (auto _ : state) {
    fipp::update_field(field, params);
    benchmark::DoNotOptimize(field.cells.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(field.cells.size()));
}

void BM_Episode(benchmark::State& state) {
  const auto planner = state.range(0) == 0 ? fipp::PlannerKind::fipp : fipp::PlannerKind::tr;
  const fipp::Scenario sc = fipp::generate_scenario(fipp::ScenarioKind::double_flow, 30, 3);
  fipp::EpisodeConfig cfg;
  cfg.max_t = 20.0;
  for (auto _ : state) benchmark::DoNotOptimize(fipp::run_episode(sc, planner, cfg).records.size());
}

}  // namespace

BENCHMARK(BM_UpdateSerial)->Arg(40)->Arg(100)->Arg(200);
BENCHMARK(BM_UpdateParallel)->Arg(40)->Arg(100)->Arg(200);
BENCHMARK(BM_Episode)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
