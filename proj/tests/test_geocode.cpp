#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <random>
#include <thread>

#include <httplib.h>

#include "hotspot/error.hpp"
#include "hotspot/geocode.hpp"
#include "hotspot/io.hpp"
#include "support.hpp"

using namespace hotspot;

namespace {

/// Wraps a provider and counts calls.
class CountingProvider : public GeocodeProvider {
public:
  explicit CountingProvider(GeocodeProvider& inner) : inner_(inner) {}
  std::optional<GeoPoint> resolve(std::string_view query) override {
    ++calls;
    return inner_.resolve(query);
  }
  std::size_t max_in_flight() const noexcept override { return inner_.max_in_flight(); }
  std::atomic<int> calls{0};

private:
  GeocodeProvider& inner_;
};

class FlakyProvider : public GeocodeProvider {
public:
  std::optional<GeoPoint> resolve(std::string_view query) override {
    if (query.starts_with("bad")) throw ProviderTransportError("connection reset", {});
    return GeoPoint{1.0, 2.0};
  }
};

std::vector<DivisionKey> five_keys() {
  std::vector<DivisionKey> keys;
  for (int i = 0; i < 5; ++i) keys.push_back({"d" + std::to_string(i), "P"});
  return keys;
}

GeoCache table_for(const std::vector<DivisionKey>& keys) {
  GeoCache table;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    table.insert(keys[i], {10.0 + static_cast<double>(i), 70.0});
  }
  return table;
}

}  // namespace

TEST_SUITE("geocode") {

TEST_CASE("form_query") {
  CHECK(form_query({"Mumbai", "Maharashtra"}) == "Mumbai, Maharashtra");
  CHECK(form_query({"X", "Y"}) == "X, Y");
  CHECK(form_query({std::string(trim("Leh ")), "Ladakh"}) == "Leh, Ladakh");
}

TEST_CASE("all keys cached: no provider calls") {
  const auto keys = five_keys();
  auto cache = table_for(keys);
  FixtureProvider fixture{GeoCache{}};
  CountingProvider counting(fixture);
  const auto r = resolve_all(keys, counting, cache);
  CHECK(r.points.size() == 5);
  CHECK(counting.calls == 0);
  CHECK(r.provider_calls == 0);
}

TEST_CASE("only misses reach the provider") {
  const auto keys = five_keys();
  FixtureProvider fixture(table_for(keys));
  CountingProvider counting(fixture);
  GeoCache cache;
  cache.insert(keys[0], {10.0, 70.0});
  cache.insert(keys[1], {11.0, 70.0});
  cache.insert(keys[2], {12.0, 70.0});
  const auto r = resolve_all(keys, counting, cache);
  CHECK(counting.calls == 2);
  CHECK(r.points.size() == 5);
  CHECK(cache.size() == 5);
  CHECK(r.points.at(keys[4]) == GeoPoint{14.0, 70.0});

  SUBCASE("a second run is served entirely from the cache") {
    counting.calls = 0;
    const auto again = resolve_all(keys, counting, cache);
    CHECK(counting.calls == 0);
    CHECK(again.points == r.points);
  }
}

TEST_CASE("unknown places are omitted and reported") {
  auto keys = five_keys();
  auto table = table_for({keys[0], keys[1], keys[2], keys[3]});
  FixtureProvider fixture(table);
  GeoCache cache;
  const auto r = resolve_all(keys, fixture, cache);
  CHECK(r.points.size() == 4);
  REQUIRE(r.missing.size() == 1);
  CHECK(r.missing[0] == keys[4]);
  CHECK_FALSE(cache.find(keys[4]));
}

TEST_CASE("cache and fixture lookups ignore case and padding") {
  GeoCache table;
  table.insert({"Mumbai", "Maharashtra"}, {19.0, 72.8});
  CHECK(table.find({" mumbai", "MAHARASHTRA"}) == GeoPoint{19.0, 72.8});
  FixtureProvider fixture(table);
  CHECK(fixture.resolve("MUMBAI, maharashtra ") == GeoPoint{19.0, 72.8});
  CHECK_FALSE(fixture.resolve("Pune, Maharashtra"));
}

TEST_CASE("transport failures are retryable and keep the successes") {
  const std::vector<DivisionKey> keys = {{"good1", "P"}, {"bad1", "P"}, {"good2", "P"},
                                         {"bad2", "P"}};
  FlakyProvider flaky;
  GeoCache cache;
  try {
    resolve_all(keys, flaky, cache);
    FAIL("expected ProviderTransportError");
  } catch (const ProviderTransportError& e) {
    REQUIRE(e.failed_keys().size() == 2);
    CHECK(e.failed_keys()[0].division == "bad1");
    CHECK(e.failed_keys()[1].division == "bad2");
  }
  CHECK(cache.size() == 2);
  CHECK(cache.find({"good2", "P"}));
}

TEST_CASE("cache file round trip is bit-exact") {
  const auto dir = test::scratch_dir("geocode_cache");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  std::map<DivisionKey, GeoPoint> expected;
  {
    auto cache = GeoCache::open(dir / "coords.json");
    CHECK(cache.size() == 0);
    for (int i = 0; i < 500; ++i) {
      DivisionKey key{"d" + std::to_string(i), "State " + std::to_string(i % 9)};
      GeoPoint p{lat(rng), lon(rng)};
      cache.insert(key, p);
      expected[key] = p;
    }
    cache.flush();
  }
  const auto reloaded = GeoCache::open(dir / "coords.json");
  const auto got = reloaded.entries();
  REQUIRE(got.size() == expected.size());
  for (const auto& [key, p] : expected) {
    const auto& q = got.at(key);
    CHECK(std::memcmp(&p.lat, &q.lat, sizeof(double)) == 0);
    CHECK(std::memcmp(&p.lon, &q.lon, sizeof(double)) == 0);
  }
  CHECK(reloaded.dump() == read_file(dir / "coords.json"));
}

TEST_CASE("cache format and errors") {
  const auto cache = GeoCache::parse(R"({"Pune|Maharashtra": {"lat": 18.5, "lon": 73.8}})");
  CHECK(cache.find({"Pune", "Maharashtra"}) == GeoPoint{18.5, 73.8});
  CHECK_THROWS_AS(GeoCache::parse("[1,2]"), IoError);
  CHECK_THROWS_AS(GeoCache::parse(R"({"Pune|M": {"lat": "x", "lon": 1}})"), IoError);
  CHECK_THROWS_AS(GeoCache::parse(R"({"NoBar": {"lat": 1, "lon": 1}})"), DataError);
  CHECK_THROWS_AS(GeoCache::parse(R"({"a|b": {"lat": 91, "lon": 1}})"), DataError);
  GeoCache c;
  CHECK_THROWS_AS(c.insert({"a|b", "c"}, {0, 0}), DataError);
}

TEST_CASE("cache write failure is a fatal I/O error") {
  auto cache = GeoCache::open("/nonexistent-dir/for/sure/coords.json");
  const auto keys = five_keys();
  FixtureProvider fixture(table_for(keys));
  CHECK_THROWS_AS(resolve_all(keys, fixture, cache), IoError);
}

TEST_CASE("fixture provider tolerates concurrent use") {
  std::vector<DivisionKey> keys;
  for (int i = 0; i < 400; ++i) keys.push_back({"d" + std::to_string(i), "P"});
  FixtureProvider fixture(table_for(keys));
  CHECK(fixture.max_in_flight() == 0);
  GeoCache cache;
  const auto r = resolve_all(keys, fixture, cache);
  CHECK(r.points.size() == 400);
  CHECK(r.provider_calls == 400);
}

TEST_CASE("response parsing") {
  HttpProviderConfig cfg;
  cfg.results_pointer = "/results";
  cfg.lat_pointer = "/geometry/location/lat";
  cfg.lon_pointer = "/geometry/location/lng";

  const auto one = R"({"results":[{"geometry":{"location":{"lat":19.07,"lng":72.87}}}]})";
  CHECK(parse_geocode_response(one, cfg) == GeoPoint{19.07, 72.87});

  const auto two = R"({"results":[{"geometry":{"location":{"lat":1,"lng":2}}},
                                   {"geometry":{"location":{"lat":3,"lng":4}}}]})";
  CHECK(parse_geocode_response(two, cfg) == GeoPoint{1, 2});

  CHECK_FALSE(parse_geocode_response(R"({"results":[]})", cfg));
  CHECK_FALSE(parse_geocode_response(R"({"status":"ZERO_RESULTS"})", cfg));
  CHECK_FALSE(parse_geocode_response(R"({"results":[{"geometry":{}}]})", cfg));

  HttpProviderConfig flat;
  CHECK(parse_geocode_response(R"({"lat":"12.5","lon":77})", flat) == GeoPoint{12.5, 77});
  CHECK_THROWS_AS(parse_geocode_response("<html>", flat), ProviderTransportError);
}

TEST_CASE("http provider config validation") {
  CHECK_THROWS_AS(HttpProvider({.url_template = "http://x/geo"}), ConfigError);
  CHECK_THROWS_AS(HttpProvider({.url_template = "x/geo?q={query}"}), ConfigError);
  CHECK_THROWS_AS(HttpProvider({.url_template = "http://x/?q={query}",
                                .api_key_env = "HOTSPOT_TEST_SURELY_UNSET_VAR"}),
                  ConfigError);
  ::setenv("HOTSPOT_TEST_KEY", "s3cr=t", 1);
  HttpProvider p({.url_template = "http://h:1/geo?q={query}&key={key}",
                  .api_key_env = "HOTSPOT_TEST_KEY"});
  CHECK(p.request_url("Leh, Ladakh") == "http://h:1/geo?q=Leh%2C%20Ladakh&key=s3cr%3Dt");
}

TEST_CASE("http provider against a local server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Get("/geo", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    const auto q = req.get_param_value("q");
    if (req.get_param_value("key") != "k123") {
      res.status = 403;
      return;
    }
    if (q == "Mumbai, Maharashtra") {
      res.set_content(R"({"items":[{"lat":19.076,"lon":72.8777},{"lat":0,"lon":0}]})",
                      "application/json");
    } else if (q == "Boom, X") {
      res.status = 500;
    } else {
      res.set_content(R"({"items":[]})", "application/json");
    }
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("HOTSPOT_TEST_KEY", "k123", 1);
  HttpProviderConfig cfg{.url_template = "http://127.0.0.1:" + std::to_string(port) +
                                         "/geo?q={query}&key={key}",
                         .api_key_env = "HOTSPOT_TEST_KEY",
                         .results_pointer = "/items"};
  HttpProvider provider(cfg);
  CHECK(provider.max_in_flight() == 1);
  CHECK(provider.resolve("Mumbai, Maharashtra") == GeoPoint{19.076, 72.8777});
  CHECK_FALSE(provider.resolve("Atlantis, Sea"));
  CHECK_THROWS_AS(provider.resolve("Boom, X"), ProviderTransportError);

  GeoCache cache;
  const auto r = resolve_all({{"Mumbai", "Maharashtra"}, {"Atlantis", "Sea"}}, provider, cache);
  CHECK(r.points.size() == 1);
  CHECK(r.missing.size() == 1);
  CHECK(hits == 5);

  server.stop();
  thread.join();

  // Nothing listening any more.
  CHECK_THROWS_AS(provider.resolve("Mumbai, Maharashtra"), ProviderTransportError);
}

}  // TEST_SUITE
