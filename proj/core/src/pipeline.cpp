#include "hotspot/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hotspot/artifacts.hpp"
#include "hotspot/error.hpp"
#include "hotspot/io.hpp"

namespace hotspot {
namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

LoadedTable ingest(const PipelineConfig& config) {
  return in_stage("ingest", [&] {
    std::ifstream in(config.infections, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open infections file {}", config.infections.string()));
    return load_infection_table(in, config.schema);
  });
}

std::vector<DivisionKey> keys_of(const std::vector<InfectionRecord>& records) {
  std::vector<DivisionKey> keys;
  keys.reserve(records.size());
  for (const auto& r : records) keys.push_back(r.key);
  return keys;
}

void geocode_table(const PipelineConfig& config, const LoadedTable& table,
                   GeocodeProvider& provider, PipelineReport& report) {
  in_stage("geocode", [&] {
    auto cache = GeoCache::open(config.coords_cache);
    auto resolved = resolve_all(keys_of(table.records), provider, cache);
    report.provider_calls = resolved.provider_calls;
    for (const auto& key : resolved.missing) {
      spdlog::warn("geocoder could not resolve '{}'", form_query(key));
    }
    report.geocode_missing = std::move(resolved.missing);
  });
}

void note_unresolved(PipelineReport& report, MergeResult& merged) {
  for (const auto& key : merged.unresolved) {
    spdlog::warn("no coordinates for '{}'; division excluded", form_query(key));
  }
  report.unresolved = std::move(merged.unresolved);
}

void fill_danger_stats(PipelineReport& report, std::vector<double> values) {
  if (values.empty()) return;
  std::sort(values.begin(), values.end());
  report.danger_min = values.front();
  report.danger_median = quantile_linear(values, 0.5);
  report.danger_max = values.back();
}

EpiGraph graph_stage(const PipelineConfig& config, std::vector<Division> divisions) {
  return in_stage("build-graph", [&] {
    return EpiGraph::build(std::move(divisions), config.threshold, config.metric);
  });
}

void render_outputs(std::span<const DangerRecord> records, Normalization mode, double cap,
                    const fs::path& out_geojson, const std::optional<fs::path>& out_html) {
  const auto features = make_features(records, mode, cap);
  write_file_atomic(out_geojson, [&](std::ostream& out) { emit_geojson(features, out); });
  if (out_html) {
    write_file_atomic(*out_html, [&](std::ostream& out) { emit_html(features, out); });
  }
}

}  // namespace

std::string_view to_string(ProviderKind kind) noexcept {
  return kind == ProviderKind::Fixture ? "fixture" : "http";
}

ProviderKind parse_provider(std::string_view text) {
  if (text == "fixture") return ProviderKind::Fixture;
  if (text == "http") return ProviderKind::Http;
  throw ConfigError(fmt::format("unknown provider '{}' (expected fixture or http)", text));
}

void validate(const PipelineConfig& config) {
  if (!(config.threshold > 0.0)) {
    throw ConfigError(fmt::format("threshold must be > 0, got {}", config.threshold));
  }
  if (!(config.cap > 0.0)) throw ConfigError(fmt::format("cap must be > 0, got {}", config.cap));

  std::vector<fs::path> paths = {config.infections, config.coords_cache, config.out_geojson};
  for (const auto& p : {config.out_html, config.out_graph, config.out_danger}) {
    if (p) paths.push_back(*p);
  }
  std::set<fs::path> seen;
  for (const auto& p : paths) {
    if (p.empty()) continue;
    if (!seen.insert(p.lexically_normal()).second) {
      throw ConfigError(fmt::format("path {} is used for more than one input/output", p.string()));
    }
  }
}

std::string format_report(const PipelineReport& r) {
  std::ostringstream out;
  out << fmt::format("divisions loaded:    {}\n", r.rows_loaded);
  out << fmt::format("rows dropped:        {}\n", r.rows_dropped);
  out << fmt::format("geocoder calls:      {}\n", r.provider_calls);
  out << fmt::format("geocoder misses:     {}\n", r.geocode_missing.size());
  for (const auto& k : r.geocode_missing) out << "  - " << form_query(k) << '\n';
  out << fmt::format("unresolved keys:     {}\n", r.unresolved.size());
  for (const auto& k : r.unresolved) out << "  - " << form_query(k) << '\n';
  out << fmt::format("graph:               {} nodes, {} edges\n", r.nodes, r.edges);
  if (r.danger_min) {
    out << fmt::format("danger min/med/max:  {} / {} / {}\n", format_number(*r.danger_min),
                       format_number(*r.danger_median), format_number(*r.danger_max));
  }
  return out.str();
}

std::unique_ptr<GeocodeProvider> make_provider(const PipelineConfig& config) {
  if (config.provider == ProviderKind::Http) return std::make_unique<HttpProvider>(config.http);
  const auto& table = config.fixture ? *config.fixture : config.coords_cache;
  if (!fs::exists(table)) return std::make_unique<FixtureProvider>(GeoCache{});
  return std::make_unique<FixtureProvider>(FixtureProvider::from_file(table));
}

PipelineReport run_geocode(const PipelineConfig& config, GeocodeProvider& provider) {
  PipelineReport report;
  const auto table = ingest(config);
  report.rows_loaded = table.records.size();
  report.rows_dropped = table.dropped_rows;
  geocode_table(config, table, provider, report);
  return report;
}

PipelineReport run_build_graph(const PipelineConfig& config, const fs::path& out_graph) {
  PipelineReport report;
  const auto table = ingest(config);
  report.rows_loaded = table.records.size();
  report.rows_dropped = table.dropped_rows;
  auto merged = in_stage("merge", [&] {
    const auto cache = GeoCache::open(config.coords_cache);
    return merge_coordinates(table.records, cache.entries());
  });
  note_unresolved(report, merged);
  const auto graph = graph_stage(config, std::move(merged.divisions));
  report.nodes = graph.node_count();
  report.edges = graph.edge_count();
  in_stage("build-graph", [&] {
    write_file_atomic(out_graph, [&](std::ostream& out) { write_graph_json(graph, out); });
  });
  return report;
}

PipelineReport run_score(const fs::path& graph_file, Measure measure, const fs::path& out_danger) {
  PipelineReport report;
  in_stage("score", [&] {
    const auto graph = read_graph_json(read_file(graph_file));
    const auto danger = score_all(graph, measure);
    report.nodes = graph.node_count();
    report.edges = graph.edge_count();
    fill_danger_stats(report, danger.values());
    write_file_atomic(out_danger, [&](std::ostream& out) { write_danger_json(graph, danger, out); });
  });
  return report;
}

PipelineReport run_render(const fs::path& danger_file, Normalization mode, double cap,
                          const fs::path& out_geojson, const std::optional<fs::path>& out_html) {
  PipelineReport report;
  in_stage("render", [&] {
    const auto file = read_danger_json(read_file(danger_file));
    std::vector<double> values;
    for (const auto& r : file.records) values.push_back(r.danger);
    report.nodes = file.records.size();
    fill_danger_stats(report, std::move(values));
    render_outputs(file.records, mode, cap, out_geojson, out_html);
  });
  return report;
}

PipelineReport run_pipeline(const PipelineConfig& config, GeocodeProvider& provider) {
  in_stage("config", [&] { validate(config); });
  PipelineReport report;
  const auto table = ingest(config);
  report.rows_loaded = table.records.size();
  report.rows_dropped = table.dropped_rows;
  geocode_table(config, table, provider, report);

  auto merged = in_stage("merge", [&] {
    const auto cache = GeoCache::open(config.coords_cache);
    return merge_coordinates(table.records, cache.entries());
  });
  note_unresolved(report, merged);
  const auto graph = graph_stage(config, std::move(merged.divisions));
  report.nodes = graph.node_count();
  report.edges = graph.edge_count();
  if (config.out_graph) {
    in_stage("build-graph", [&] {
      write_file_atomic(*config.out_graph, [&](std::ostream& out) { write_graph_json(graph, out); });
    });
  }

  const auto danger = in_stage("score", [&] { return score_all(graph, config.measure); });
  fill_danger_stats(report, danger.values());
  if (config.out_danger) {
    in_stage("score", [&] {
      write_file_atomic(*config.out_danger,
                        [&](std::ostream& out) { write_danger_json(graph, danger, out); });
    });
  }

  in_stage("render", [&] {
    const auto records = danger_records(graph, danger);
    render_outputs(records, config.normalize, config.cap, config.out_geojson, config.out_html);
  });
  return report;
}

}  // namespace hotspot
