#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hotspot/artifacts.hpp"
#include "hotspot/danger.hpp"
#include "hotspot/geograph.hpp"
#include "hotspot/riskmap.hpp"

namespace {

using hotspot::Division;

// Districts scattered over an India-sized bounding box.
std::vector<Division> scattered(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(8.0, 35.0), lon(68.0, 97.0);
  std::uniform_int_distribution<std::int64_t> active(0, 20000);
  std::vector<Division> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({{"d" + std::to_string(i), "s"}, {lat(rng), lon(rng)}, active(rng), 0});
  }
  return out;
}

hotspot::Metric metric_arg(const benchmark::State& state) {
  return state.range(1) == 0 ? hotspot::Metric::DegreeEuclidean : hotspot::Metric::HaversineKm;
}

double threshold_for(hotspot::Metric metric) {
  return metric == hotspot::Metric::DegreeEuclidean ? 1.3 : 1.3 * 111.19;
}

void BM_BruteForceNeighbors(benchmark::State& state) {
  const auto nodes = scattered(state.range(0));
  const auto metric = metric_arg(state);
  for (auto _ : state) {
    auto edges = hotspot::brute_force_neighbors(nodes, threshold_for(metric), metric);
    benchmark::DoNotOptimize(edges.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_GridNeighbors(benchmark::State& state) {
  const auto nodes = scattered(state.range(0));
  const auto metric = metric_arg(state);
  for (auto _ : state) {
    auto edges = hotspot::grid_neighbors(nodes, threshold_for(metric), metric);
    benchmark::DoNotOptimize(edges.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_ScoreAll(benchmark::State& state) {
  const auto graph =
      hotspot::EpiGraph::build(scattered(state.range(0)), 1.3, hotspot::Metric::DegreeEuclidean);
  const auto measure = static_cast<hotspot::Measure>(state.range(1));
  for (auto _ : state) {
    auto danger = hotspot::score_all(graph, measure);
    benchmark::DoNotOptimize(danger.entries.data());
  }
}

// Build, score and render, as the pipeline does after geocoding.
void BM_BuildScoreRender(benchmark::State& state) {
  const auto nodes = scattered(state.range(0));
  for (auto _ : state) {
    const auto graph = hotspot::EpiGraph::build(nodes, 1.3, hotspot::Metric::DegreeEuclidean);
    const auto danger = hotspot::score_all(graph, hotspot::Measure::Nws);
    const auto features = hotspot::make_features(hotspot::danger_records(graph, danger),
                                                 hotspot::Normalization::Cap);
    std::ostringstream geo, html;
    hotspot::emit_geojson(features, geo);
    hotspot::emit_html(features, html);
    benchmark::DoNotOptimize(geo.str().size() + html.str().size());
  }
}

}  // namespace

BENCHMARK(BM_BruteForceNeighbors)
    ->ArgsProduct({{750, 2000, 10000}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridNeighbors)
    ->ArgsProduct({{750, 2000, 10000, 50000}, {0, 1}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreAll)->ArgsProduct({{750, 10000}, {0, 1, 2}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BuildScoreRender)->Arg(750)->Arg(5000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
