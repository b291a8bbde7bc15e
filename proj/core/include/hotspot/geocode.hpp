#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hotspot/types.hpp"

namespace hotspot {

/// "<division>, <parent>", the free-text query handed to a geocoder.
std::string form_query(const DivisionKey& key);

/// Resolves a free-text place query to a single point.
///
/// Implementations return nullopt when the place is unknown and throw
/// ProviderTransportError when the backend cannot be reached. `resolve` may
/// be called from up to `max_in_flight()` threads at once; 0 means no limit.
class GeocodeProvider {
public:
  virtual ~GeocodeProvider() = default;
  virtual std::optional<GeoPoint> resolve(std::string_view query) = 0;
  virtual std::size_t max_in_flight() const noexcept { return 1; }
};

/// Coordinate cache keyed by division. Lookups are case-insensitive and
/// whitespace-trimmed; the stored key keeps the spelling it was inserted with.
///
/// On disk the cache is a JSON object `{"division|parent": {"lat": .., "lon": ..}}`.
/// Coordinates survive a save/load round trip bit-exactly.
class GeoCache {
public:
  GeoCache() = default;

  /// Opens a cache backed by `path`. A missing file yields an empty cache;
  /// an unreadable or malformed one throws IoError.
  static GeoCache open(const std::filesystem::path& path);

  /// Parses the on-disk format from a string.
  static GeoCache parse(std::string_view json_text);

  std::optional<GeoPoint> find(const DivisionKey& key) const;
  void insert(const DivisionKey& key, GeoPoint point);
  std::size_t size() const noexcept { return entries_.size(); }

  /// Key -> point map in key order.
  std::map<DivisionKey, GeoPoint> entries() const;

  std::string dump() const;

  /// Atomically rewrites the backing file. No-op for an in-memory cache.
  /// Throws IoError on failure.
  void flush() const;

  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

private:
  std::map<DivisionKey, std::pair<DivisionKey, GeoPoint>> entries_;  // normalized -> original
  std::optional<std::filesystem::path> path_;
};

/// Serves queries from a fixed table in the cache file format. Deterministic
/// and safe for unbounded concurrent use.
class FixtureProvider final : public GeocodeProvider {
public:
  explicit FixtureProvider(const GeoCache& table);
  static FixtureProvider from_file(const std::filesystem::path& path);

  std::optional<GeoPoint> resolve(std::string_view query) override;
  std::size_t max_in_flight() const noexcept override { return 0; }

private:
  std::map<std::string, GeoPoint> by_query_;
};

/// Settings for a JSON-over-HTTP geocoding service.
struct HttpProviderConfig {
  /// Full URL with a `{query}` placeholder and optionally `{key}`, e.g.
  /// "https://maps.example.com/geocode/json?address={query}&key={key}".
  std::string url_template;
  /// Name of the environment variable holding the API key. Empty for none.
  std::string api_key_env;
  /// JSON pointer to the array of candidate results. Empty when the response
  /// holds a single result at the root.
  std::string results_pointer;
  /// JSON pointers to latitude and longitude, relative to one result.
  std::string lat_pointer = "/lat";
  std::string lon_pointer = "/lon";
  std::size_t max_in_flight = 1;
  int timeout_seconds = 10;
};

/// Generic HTTP geocoder. An empty result list or a missing lat/lon path is
/// reported as not-found; a non-2xx status or connection failure throws
/// ProviderTransportError. When several candidates come back the first one
/// is used and a warning is logged.
class HttpProvider final : public GeocodeProvider {
public:
  explicit HttpProvider(HttpProviderConfig config);

  std::optional<GeoPoint> resolve(std::string_view query) override;
  std::size_t max_in_flight() const noexcept override { return config_.max_in_flight; }

  /// The URL that would be requested for `query`, with the key substituted.
  std::string request_url(std::string_view query) const;

private:
  HttpProviderConfig config_;
  std::string api_key_;
};

/// Extracts a point from a decoded response body using `config`'s pointers.
/// Exposed for testing the response contract without a server.
std::optional<GeoPoint> parse_geocode_response(std::string_view body,
                                               const HttpProviderConfig& config);

struct ResolveResult {
  std::map<DivisionKey, GeoPoint> points;
  std::vector<DivisionKey> missing;
  std::size_t provider_calls = 0;
};

/// Resolves every key, consulting `cache` first and `provider` only for
/// misses. New resolutions are inserted into the cache and flushed once.
/// Keys the provider does not know are listed in `missing`.
///
/// If some provider calls fail with a transport error, all successful
/// results are still cached and a ProviderTransportError listing the failed
/// keys is thrown afterwards.
ResolveResult resolve_all(const std::vector<DivisionKey>& keys, GeocodeProvider& provider,
                          GeoCache& cache);

}  // namespace hotspot
