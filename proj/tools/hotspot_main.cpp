// hotspot: build a threshold graph of divisions, score hotspot danger and
// render a colour-coded risk map.
//
//   hotspot pipeline    --infections cases.csv --coords-cache coords.json --out-geojson map.geojson
//   hotspot geocode     --infections cases.csv --coords-cache coords.json
//   hotspot build-graph --infections cases.csv --coords-cache coords.json --out-graph graph.json
//   hotspot score       --graph graph.json --out-danger danger.json
//   hotspot render      --danger danger.json --out-geojson map.geojson [--out-html map.html]
//
// Every option can also be given in a key=value file passed with --config;
// command-line flags take precedence.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hotspot/error.hpp"
#include "hotspot/pipeline.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string infections;
  std::string coords_cache;
  std::string provider = "fixture";
  std::string fixture;
  std::string http_url;
  std::string http_key_env;
  std::string http_results;
  std::string http_lat = "/lat";
  std::string http_lon = "/lon";
  std::size_t http_in_flight = 1;

  std::string col_parent = "State";
  std::string col_division = "District";
  std::string col_active = "Active";
  std::string col_delta = "Delta_Active";
  char delimiter = ',';

  double threshold = hotspot::kDefaultThreshold;
  std::string metric = "degree-euclidean";
  std::string measure = "nwos";
  std::string normalize = "cap";
  double cap = hotspot::kDefaultCap;

  std::string graph;
  std::string danger;
  std::string out_geojson;
  std::string out_html;
  std::string out_graph;
  std::string out_danger;
};

template <typename T>
std::optional<T> non_empty(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return T(s);
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw hotspot::ConfigError(std::string(flag) + " is required");
}

hotspot::PipelineConfig to_config(const Options& o) {
  hotspot::PipelineConfig c;
  c.infections = o.infections;
  c.coords_cache = o.coords_cache;
  c.schema = {o.col_parent, o.col_division, o.col_active, o.col_delta, o.delimiter};
  c.provider = hotspot::parse_provider(o.provider);
  c.fixture = non_empty<std::filesystem::path>(o.fixture);
  c.http.url_template = o.http_url;
  c.http.api_key_env = o.http_key_env;
  c.http.results_pointer = o.http_results;
  c.http.lat_pointer = o.http_lat;
  c.http.lon_pointer = o.http_lon;
  c.http.max_in_flight = o.http_in_flight;
  c.threshold = o.threshold;
  c.metric = hotspot::parse_metric(o.metric);
  c.measure = hotspot::parse_measure(o.measure);
  c.normalize = hotspot::parse_normalization(o.normalize);
  c.cap = o.cap;
  c.out_geojson = o.out_geojson;
  c.out_html = non_empty<std::filesystem::path>(o.out_html);
  c.out_graph = non_empty<std::filesystem::path>(o.out_graph);
  c.out_danger = non_empty<std::filesystem::path>(o.out_danger);
  return c;
}

void add_options(CLI::App& app, Options& o) {
  app.set_config("--config", "", "key=value file with default option values");

  app.add_option("--infections", o.infections, "Delimited table of infection counts");
  app.add_option("--coords-cache", o.coords_cache, "JSON coordinate cache (read and updated)");
  app.add_option("--provider", o.provider, "Geocoder: fixture or http")
      ->check(CLI::IsMember({"fixture", "http"}));
  app.add_option("--fixture", o.fixture,
                 "Coordinate table backing the fixture provider (defaults to the cache)");
  app.add_option("--http-url", o.http_url, "Geocoder URL template with {query} and {key}");
  app.add_option("--http-key-env", o.http_key_env,
                 "Environment variable that holds the geocoder API key");
  app.add_option("--http-results", o.http_results, "JSON pointer to the result array");
  app.add_option("--http-lat", o.http_lat, "JSON pointer to latitude within a result");
  app.add_option("--http-lon", o.http_lon, "JSON pointer to longitude within a result");
  app.add_option("--http-in-flight", o.http_in_flight, "Concurrent geocoder requests")
      ->check(CLI::PositiveNumber);

  app.add_option("--col-parent", o.col_parent, "Column holding the parent division name");
  app.add_option("--col-division", o.col_division, "Column holding the division name");
  app.add_option("--col-active", o.col_active, "Column holding active cases");
  app.add_option("--col-delta", o.col_delta, "Column holding the change in active cases");
  app.add_option("--delimiter", o.delimiter, "Field delimiter of the infections table");

  app.add_option("--threshold", o.threshold, "Maximum edge length (metric units)");
  app.add_option("--metric", o.metric, "degree-euclidean or haversine-km")
      ->check(CLI::IsMember({"degree-euclidean", "haversine-km"}));
  app.add_option("--measure", o.measure, "Danger measure: nwos, nws or isl")
      ->check(CLI::IsMember({"nwos", "nws", "isl"}));
  app.add_option("--normalize", o.normalize, "Normalization: cap or iqr")
      ->check(CLI::IsMember({"cap", "iqr"}));
  app.add_option("--cap", o.cap, "Raw danger mapped to full red in cap mode");

  app.add_option("--graph", o.graph, "Graph file read by score");
  app.add_option("--danger", o.danger, "Danger file read by render");
  app.add_option("--out-geojson", o.out_geojson, "GeoJSON risk map to write");
  app.add_option("--out-html", o.out_html, "Self-contained HTML risk map to write");
  app.add_option("--out-graph", o.out_graph, "Graph file to write");
  app.add_option("--out-danger", o.out_danger, "Danger file to write");
}

int run(CLI::App& app, const Options& o) {
  hotspot::PipelineReport report;
  try {
    const auto config = to_config(o);
    if (app.got_subcommand("pipeline")) {
      require(o.infections, "--infections");
      require(o.coords_cache, "--coords-cache");
      require(o.out_geojson, "--out-geojson");
      hotspot::validate(config);
      auto provider = hotspot::make_provider(config);
      report = hotspot::run_pipeline(config, *provider);
    } else if (app.got_subcommand("geocode")) {
      require(o.infections, "--infections");
      require(o.coords_cache, "--coords-cache");
      auto provider = hotspot::make_provider(config);
      report = hotspot::run_geocode(config, *provider);
    } else if (app.got_subcommand("build-graph")) {
      require(o.infections, "--infections");
      require(o.coords_cache, "--coords-cache");
      require(o.out_graph, "--out-graph");
      hotspot::validate(config);
      report = hotspot::run_build_graph(config, o.out_graph);
    } else if (app.got_subcommand("score")) {
      require(o.graph, "--graph");
      require(o.out_danger, "--out-danger");
      report = hotspot::run_score(o.graph, config.measure, o.out_danger);
    } else if (app.got_subcommand("render")) {
      require(o.danger, "--danger");
      require(o.out_geojson, "--out-geojson");
      hotspot::validate(config);
      report = hotspot::run_render(o.danger, config.normalize, config.cap, o.out_geojson,
                                   config.out_html);
    }
  } catch (const hotspot::ConfigError& e) {
    std::cerr << "hotspot: error: [config] " << e.what() << '\n';
    return kExitUsage;
  } catch (const hotspot::StageError& e) {
    if (e.stage() == "config") {
      std::cerr << "hotspot: error: " << e.what() << '\n';
      return kExitUsage;
    }
    std::cerr << "hotspot: error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "hotspot: error: " << e.what() << '\n';
    return kExitFailure;
  }
  std::cout << hotspot::format_report(report);
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hotspot risk mapping from division-level infection counts"};
  app.require_subcommand(1);
  app.fallthrough();

  Options options;
  add_options(app, options);
  app.add_subcommand("pipeline", "Run every stage and write the risk map");
  app.add_subcommand("geocode", "Resolve coordinates for every division into the cache");
  app.add_subcommand("build-graph", "Build the threshold graph from infections and the cache");
  app.add_subcommand("score", "Compute raw danger levels for a graph file");
  app.add_subcommand("render", "Normalize danger levels and write GeoJSON/HTML maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? EXIT_SUCCESS : kExitUsage;
  }
  return run(app, options);
}
