#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hotspot/danger.hpp"
#include "hotspot/error.hpp"
#include "hotspot/geocode.hpp"
#include "hotspot/geograph.hpp"
#include "hotspot/ingest.hpp"
#include "hotspot/riskmap.hpp"

namespace hotspot {

inline constexpr double kDefaultThreshold = 1.3;

enum class ProviderKind { Fixture, Http };

std::string_view to_string(ProviderKind kind) noexcept;
ProviderKind parse_provider(std::string_view text);

struct PipelineConfig {
  std::filesystem::path infections;
  std::filesystem::path coords_cache;
  TableSchema schema;

  ProviderKind provider = ProviderKind::Fixture;
  /// Backing table for the fixture provider. Defaults to the cache itself.
  std::optional<std::filesystem::path> fixture;
  HttpProviderConfig http;

  double threshold = kDefaultThreshold;
  Metric metric = Metric::DegreeEuclidean;
  Measure measure = Measure::Nwos;
  Normalization normalize = Normalization::Cap;
  double cap = kDefaultCap;

  std::filesystem::path out_geojson;
  std::optional<std::filesystem::path> out_html;
  std::optional<std::filesystem::path> out_graph;
  std::optional<std::filesystem::path> out_danger;
};

/// Throws ConfigError unless threshold and cap are positive and every
/// configured path is distinct.
void validate(const PipelineConfig& config);

/// An error tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& message)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

struct PipelineReport {
  std::size_t rows_loaded = 0;
  std::size_t rows_dropped = 0;
  std::size_t provider_calls = 0;
  std::vector<DivisionKey> geocode_missing;
  std::vector<DivisionKey> unresolved;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::optional<double> danger_min;
  std::optional<double> danger_median;
  std::optional<double> danger_max;
};

std::string format_report(const PipelineReport& report);

std::unique_ptr<GeocodeProvider> make_provider(const PipelineConfig& config);

// Individual stages. Each reads the previous stage's file and writes its own;
// run_pipeline is their composition and produces the same bytes.

/// Loads the infection table and fills the coordinate cache for every row.
/// Unresolvable divisions are reported, not fatal.
PipelineReport run_geocode(const PipelineConfig& config, GeocodeProvider& provider);

/// Merges the infection table with the cache and writes the graph file.
PipelineReport run_build_graph(const PipelineConfig& config, const std::filesystem::path& out_graph);

/// Scores a graph file and writes a danger file.
PipelineReport run_score(const std::filesystem::path& graph_file, Measure measure,
                         const std::filesystem::path& out_danger);

/// Renders a danger file to GeoJSON and, optionally, HTML.
PipelineReport run_render(const std::filesystem::path& danger_file, Normalization mode, double cap,
                          const std::filesystem::path& out_geojson,
                          const std::optional<std::filesystem::path>& out_html);

/// Runs every stage in memory and writes the configured outputs. Errors are
/// rethrown as StageError naming the failing stage.
PipelineReport run_pipeline(const PipelineConfig& config, GeocodeProvider& provider);

}  // namespace hotspot
