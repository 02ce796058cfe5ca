#include <benchmark/benchmark.h>

#include <numbers>

#include "isoflow/flow_ode.hpp"
#include "isoflow/mass.hpp"
#include "isoflow/metric.hpp"
#include "isoflow/profile.hpp"

namespace {

void BM_phi(benchmark::State& state) {
  double a = 16.0 * std::numbers::pi * 1.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::phi(1.0, a));
    a = a < 1e8 ? a * 1.001 : 60.0;
  }
}
BENCHMARK(BM_phi);

void BM_ratio_slope_term(benchmark::State& state) {
  double a = 120.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::ratio_slope_term(1.0, a));
    a = a < 1e8 ? a * 1.001 : 120.0;
  }
}
BENCHMARK(BM_ratio_slope_term);

void BM_coordinate_ball(benchmark::State& state) {
  const auto metric = isoflow::AmbientMetric::schwarzschild(1.0);
  double r = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::RegionSummary::coordinate_ball(metric, r));
    r = r < 1e6 ? r * 1.001 : 1.0;
  }
}
BENCHMARK(BM_coordinate_ball);

void BM_symmetric_flow(benchmark::State& state) {
  const auto metric = isoflow::AmbientMetric::schwarzschild(1.0);
  const double dt = 50.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(isoflow::run_symmetric_flow(metric, 10.0, dt, 50.0));
  }
}
BENCHMARK(BM_symmetric_flow)->Arg(1000)->Arg(10000);

}  // namespace
