#include "hotspot/geocode.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "hotspot/error.hpp"
#include "hotspot/io.hpp"

namespace hotspot {

using nlohmann::json;

std::string form_query(const DivisionKey& key) {
  return key.division + ", " + key.parent;
}

// GeoCache

GeoCache GeoCache::parse(std::string_view json_text) {
  GeoCache cache;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw IoError(fmt::format("malformed coordinate cache: {}", e.what()));
  }
  if (!doc.is_object()) throw IoError("coordinate cache must be a JSON object");
  for (const auto& [text, value] : doc.items()) {
    const auto lat = value.find("lat");
    const auto lon = value.find("lon");
    if (!value.is_object() || lat == value.end() || lon == value.end() ||
        !lat->is_number() || !lon->is_number()) {
      throw IoError(fmt::format("cache entry '{}' needs numeric lat and lon", text));
    }
    GeoPoint point{lat->get<double>(), lon->get<double>()};
    require_valid(point);
    cache.insert(parse_key(text), point);
  }
  return cache;
}

GeoCache GeoCache::open(const std::filesystem::path& path) {
  GeoCache cache;
  if (std::filesystem::exists(path)) cache = parse(read_file(path));
  cache.path_ = path;
  return cache;
}

std::optional<GeoPoint> GeoCache::find(const DivisionKey& key) const {
  const auto it = entries_.find(normalize(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second.second;
}

void GeoCache::insert(const DivisionKey& key, GeoPoint point) {
  if (key.division.find('|') != std::string::npos) {
    throw DataError(fmt::format("division name '{}' contains '|'", key.division));
  }
  entries_.insert_or_assign(normalize(key), std::pair{key, point});
}

std::map<DivisionKey, GeoPoint> GeoCache::entries() const {
  std::map<DivisionKey, GeoPoint> out;
  for (const auto& [norm, entry] : entries_) out.emplace(entry.first, entry.second);
  return out;
}

std::string GeoCache::dump() const {
  json doc = json::object();
  for (const auto& [key, point] : entries()) {
    doc[to_string(key)] = {{"lat", point.lat}, {"lon", point.lon}};
  }
  return doc.dump(2) + "\n";
}

void GeoCache::flush() const {
  if (path_) write_file_atomic(*path_, dump());
}

// FixtureProvider

FixtureProvider::FixtureProvider(const GeoCache& table) {
  for (const auto& [key, point] : table.entries()) {
    by_query_.emplace(normalize_name(form_query(normalize(key))), point);
  }
}

FixtureProvider FixtureProvider::from_file(const std::filesystem::path& path) {
  return FixtureProvider(GeoCache::parse(read_file(path)));
}

std::optional<GeoPoint> FixtureProvider::resolve(std::string_view query) {
  const auto it = by_query_.find(normalize_name(query));
  if (it == by_query_.end()) return std::nullopt;
  return it->second;
}

// HttpProvider

namespace {

std::string percent_encode(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out += fmt::format("%{:02X}", c);
    }
  }
  return out;
}

void replace_all(std::string& text, std::string_view from, std::string_view to) {
  for (auto pos = text.find(from); pos != std::string::npos;
       pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

std::optional<double> number_at(const json& doc, const std::string& pointer) {
  const json::json_pointer ptr(pointer);
  if (!doc.contains(ptr)) return std::nullopt;
  const auto& v = doc.at(ptr);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const auto s = v.get<std::string>();
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<GeoPoint> parse_geocode_response(std::string_view body,
                                               const HttpProviderConfig& config) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ProviderTransportError(fmt::format("unparseable geocoder response: {}", e.what()),
                                 {});
  }
  const json* result = &doc;
  if (!config.results_pointer.empty()) {
    const json::json_pointer ptr(config.results_pointer);
    if (!doc.contains(ptr)) return std::nullopt;
    const auto& results = doc.at(ptr);
    if (!results.is_array() || results.empty()) return std::nullopt;
    if (results.size() > 1) {
      spdlog::warn("geocoder returned {} candidates; using the first", results.size());
    }
    result = &results.front();
  }
  try {
    const auto lat = number_at(*result, config.lat_pointer);
    const auto lon = number_at(*result, config.lon_pointer);
    if (!lat || !lon) return std::nullopt;
    GeoPoint point{*lat, *lon};
    if (!point.valid()) return std::nullopt;
    return point;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad JSON pointer in geocoder config: {}", e.what()));
  }
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  if (config_.url_template.find("{query}") == std::string::npos) {
    throw ConfigError("geocoder URL template must contain {query}");
  }
  if (config_.url_template.find("://") == std::string::npos) {
    throw ConfigError("geocoder URL template must start with http:// or https://");
  }
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError(fmt::format("environment variable {} is not set", config_.api_key_env));
    }
    api_key_ = key;
  }
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

std::string HttpProvider::request_url(std::string_view query) const {
  auto url = config_.url_template;
  replace_all(url, "{query}", percent_encode(query));
  replace_all(url, "{key}", percent_encode(api_key_));
  return url;
}

std::optional<GeoPoint> HttpProvider::resolve(std::string_view query) {
  const auto url = request_url(query);
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end + 3);
  const auto origin = url.substr(0, path_start);
  const auto target = path_start == std::string::npos ? std::string("/") : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  const auto response = client.Get(target);
  if (!response) {
    throw ProviderTransportError(
        fmt::format("request to {} failed: {}", origin, httplib::to_string(response.error())), {});
  }
  if (response->status < 200 || response->status >= 300) {
    throw ProviderTransportError(
        fmt::format("geocoder at {} answered HTTP {}", origin, response->status), {});
  }
  return parse_geocode_response(response->body, config_);
}

// resolve_all

ResolveResult resolve_all(const std::vector<DivisionKey>& keys, GeocodeProvider& provider,
                          GeoCache& cache) {
  ResolveResult out;
  std::vector<DivisionKey> misses;
  std::set<DivisionKey> queued;
  for (const auto& key : keys) {
    if (auto hit = cache.find(key)) {
      out.points.emplace(key, *hit);
    } else if (queued.insert(normalize(key)).second) {
      misses.push_back(key);
    }
  }
  if (misses.empty()) return out;

  std::vector<std::optional<GeoPoint>> found(misses.size());
  std::vector<char> failed(misses.size(), 0);
  std::string first_error;
  std::exception_ptr fatal;
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < misses.size(); i = next.fetch_add(1)) {
      try {
        found[i] = provider.resolve(form_query(misses[i]));
      } catch (const ProviderTransportError& e) {
        failed[i] = 1;
        std::lock_guard lock(error_mutex);
        if (first_error.empty()) first_error = e.what();
      } catch (...) {
        failed[i] = 1;
        std::lock_guard lock(error_mutex);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };

  std::size_t width = provider.max_in_flight();
  if (width == 0) width = std::max(1u, std::thread::hardware_concurrency());
  width = std::min(width, misses.size());
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(width);
    for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
  }
  out.provider_calls = misses.size();
  if (fatal) std::rethrow_exception(fatal);

  std::vector<DivisionKey> failed_keys;
  bool inserted = false;
  for (std::size_t i = 0; i < misses.size(); ++i) {
    if (failed[i]) {
      failed_keys.push_back(misses[i]);
    } else if (found[i]) {
      cache.insert(misses[i], *found[i]);
      out.points.emplace(misses[i], *found[i]);
      inserted = true;
    } else {
      out.missing.push_back(misses[i]);
    }
  }
  if (inserted) cache.flush();
  for (const auto& key : keys) {
    // Duplicate spellings of a key resolved above share its point.
    if (!out.points.contains(key)) {
      if (auto hit = cache.find(key)) out.points.emplace(key, *hit);
    }
  }
  if (!failed_keys.empty()) {
    throw ProviderTransportError(
        fmt::format("{} of {} geocoder requests failed: {}", failed_keys.size(), misses.size(),
                    first_error),
        std::move(failed_keys));
  }
  return out;
}

}  // namespace hotspot
