#include <benchmark/benchmark.h>

#include "isoflow/flow_levelset.hpp"
#include "isoflow/measure.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/shapes.hpp"

namespace {

isoflow::LevelSetState sphere_state(const isoflow::AmbientMetric& metric, double h) {
  return isoflow::make_state(metric, isoflow::make_grid(isoflow::ShapeSpec::sphere(4.0), h), 1.0);
}

// Range argument: cells per unit length.
void BM_evolve_step(benchmark::State& state) {
  const auto metric = isoflow::AmbientMetric::schwarzschild(1.0);
  auto st = sphere_state(metric, 1.0 / static_cast<double>(state.range(0)));
  const double dt = isoflow::cfl_limit(st);
  for (auto _ : state) benchmark::DoNotOptimize(isoflow::evolve_step(st, metric, dt));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(st.grid.size()));
}
BENCHMARK(BM_evolve_step)->Arg(10)->Arg(25)->Arg(50);

void BM_reinitialize(benchmark::State& state) {
  const auto metric = isoflow::AmbientMetric::schwarzschild(1.0);
  auto st = sphere_state(metric, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) isoflow::reinitialize(st);
}
BENCHMARK(BM_reinitialize)->Arg(10)->Arg(25)->Arg(50);

void BM_measure(benchmark::State& state) {
  const auto metric = isoflow::AmbientMetric::schwarzschild(1.0);
  const auto grid = isoflow::make_grid(isoflow::ShapeSpec::sphere(4.0),
                                       1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    const auto cs = isoflow::extract_components(grid);
    benchmark::DoNotOptimize(isoflow::measure_components(metric, grid, cs));
  }
}
BENCHMARK(BM_measure)->Arg(10)->Arg(25)->Arg(50);

void BM_freeze_sweep(benchmark::State& state) {
  const auto metric = isoflow::AmbientMetric::schwarzschild(1.0);
  auto st = sphere_state(metric, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) isoflow::freeze_sweep(st, metric);
}
BENCHMARK(BM_freeze_sweep)->Arg(10)->Arg(25)->Arg(50);

}  // namespace
