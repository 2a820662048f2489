#include <benchmark/benchmark.h>

#include <fstream>
#include <random>

#include "sda/graph.hpp"
#include "sda/simulation.hpp"
#include "sda/tessellation.hpp"

namespace {

std::vector<sda::UnitSpherePoint> uniform_points(int n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<sda::UnitSpherePoint> pts;
  for (int i = 0; i < n; ++i) pts.push_back({sda::Vec3{g(rng), g(rng), g(rng)}.normalized(), i});
  return pts;
}

const sda::Catalog& catalog() {
  static const sda::Catalog c = [] {
    std::ifstream in(SDA_CATALOG);
    return sda::load_catalog(in);
  }();
  return c;
}

void BM_Delaunay(benchmark::State& state) {
  const auto pts = uniform_points(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sda::delaunay_on_sphere(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Delaunay)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Voronoi(benchmark::State& state) {
  const auto tri = sda::delaunay_on_sphere(uniform_points(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(sda::voronoi_dual(tri));
}
BENCHMARK(BM_Voronoi)->RangeMultiplier(4)->Range(16, 4096);

void BM_Metrics(benchmark::State& state) {
  const auto g = sda::ActuatorGraph::from_triangulation(
      sda::delaunay_on_sphere(uniform_points(static_cast<int>(state.range(0)))));
  for (auto _ : state) benchmark::DoNotOptimize(sda::compute_metrics(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Metrics)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Snapshot(benchmark::State& state) {
  const auto regime = static_cast<sda::OrbitRegime>(state.range(0));
  sda::SimulationConfig cfg;
  cfg.regime = regime;
  const auto ids = sda::sample_actuators(catalog(), regime, 100.0, 42);
  const sda::UtcTime t = sda::parse_iso8601("2018-04-25T12:00:00Z");
  for (auto _ : state) benchmark::DoNotOptimize(sda::build_snapshot(catalog(), ids, t, 100.0, cfg));
  state.SetLabel(std::string(sda::to_string(regime)) + ", " + std::to_string(ids.size()) + " actuators");
}
BENCHMARK(BM_Snapshot)->DenseRange(0, 3);

void BM_DaySweep(benchmark::State& state) {
  sda::SimulationConfig cfg;
  cfg.fractions = {50};
  cfg.threads = 1;
  cfg.start_time = sda::parse_iso8601("2018-04-25T12:00:00Z");
  for (auto _ : state) benchmark::DoNotOptimize(sda::run_simulation(cfg, catalog()));
}
BENCHMARK(BM_DaySweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
