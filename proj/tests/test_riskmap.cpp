#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "hotspot/error.hpp"
#include "hotspot/riskmap.hpp"
#include "support.hpp"

using namespace hotspot;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

std::vector<RiskFeature> sample_features(std::mt19937_64& rng, std::size_t n) {
  std::vector<DangerRecord> records;
  std::uniform_real_distribution<double> danger(0, 0.6);
  for (const auto& d : test::random_divisions(rng, n, 8, 35, 68, 97)) {
    records.push_back({d, danger(rng)});
  }
  return make_features(records, Normalization::Cap, kDefaultCap);
}

/// Sorted-list quantile with linear interpolation, written out for the
/// five-point sample {0, 1, 2, 3, 4}: h = 4p, so Q1 = x[1] and Q3 = x[3].
constexpr double kQ1 = 1.0;
constexpr double kQ3 = 3.0;

}  // namespace

TEST_SUITE("riskmap") {

TEST_CASE("cap normalization") {
  const std::vector<double> raw = {0.36, 0.15, 0.0, 0.3, 5.0};
  const auto n = normalize_cap(raw, 0.3);
  CHECK(n[0] == 1.0);
  CHECK(n[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(n[2] == 0.0);
  CHECK(n[3] == 1.0);
  CHECK(n[4] == 1.0);
  CHECK_THROWS_AS(normalize_cap(raw, 0.0), ConfigError);
  CHECK_THROWS_AS(normalize_cap(raw, -0.3), ConfigError);
}

TEST_CASE("interquartile normalization") {
  const std::vector<double> raw = {0, 1, 2, 3, 4};
  std::vector<double> sorted = raw;
  CHECK(quantile_linear(sorted, 0.25) == kQ1);
  CHECK(quantile_linear(sorted, 0.75) == kQ3);
  const auto n = normalize_iqr(raw);
  CHECK(n == std::vector<double>{0.0, 0.0, 0.5, 1.0, 1.0});

  CHECK(normalize_iqr(std::vector<double>{0.4, 0.4, 0.4}) == std::vector<double>{0, 0, 0});
  CHECK(normalize_iqr(std::vector<double>{7.0}) == std::vector<double>{0});
  CHECK_THROWS_AS(normalize_iqr(std::vector<double>{}), ContractError);

  // Interpolated quartiles: n = 4 gives h = 0.75 and 2.25.
  const std::vector<double> four = {10, 20, 30, 40};
  CHECK(quantile_linear(four, 0.25) == doctest::Approx(17.5));
  CHECK(quantile_linear(four, 0.75) == doctest::Approx(32.5));
}

TEST_CASE("normalization preserves order and stays in [0, 1]") {
  std::mt19937_64 rng(61);
  std::exponential_distribution<double> dist(4.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> raw(1 + trial % 37);
    for (auto& x : raw) x = dist(rng);
    for (const auto& n : {normalize_cap(raw, 0.3), normalize_iqr(raw)}) {
      for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(n[i] >= 0.0);
        CHECK(n[i] <= 1.0);
        for (std::size_t j = 0; j < raw.size(); ++j) {
          if (raw[i] <= raw[j]) CHECK(n[i] <= n[j]);
        }
      }
    }
  }
}

TEST_CASE("gradient stops") {
  CHECK(gradient(0.0) == Rgb{0, 255, 0});
  CHECK(gradient(0.5) == Rgb{255, 165, 0});
  CHECK(gradient(1.0) == Rgb{255, 0, 0});
  // Halfway to orange: red 127.5 rounds up, green 255 - 45 = 210.
  CHECK(gradient(0.25) == Rgb{128, 210, 0});
  // Halfway from orange to red: green 82.5 rounds up.
  CHECK(gradient(0.75) == Rgb{255, 83, 0});
  CHECK_THROWS_AS(gradient(-0.01), ContractError);
  CHECK_THROWS_AS(gradient(1.01), ContractError);
  CHECK_THROWS_AS(gradient(std::nan("")), ContractError);
  CHECK(to_hex(gradient(1.0)) == "#FF0000");
  CHECK(to_hex({0x0A, 0xB0, 0x01}) == "#0AB001");
}

TEST_CASE("gradient moves monotonically towards red") {
  Rgb prev = gradient(0.0);
  for (int k = 1; k <= 10000; ++k) {
    const auto c = gradient(k / 10000.0);
    CHECK(c.r >= prev.r);
    CHECK(c.g <= prev.g);
    CHECK(c.b == 0);
    prev = c;
  }
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1 + 0.2) == "0.3");
  CHECK(format_number(72.8777) == "72.8777");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK_THROWS_AS(format_number(std::nan("")), ContractError);
}

TEST_CASE("empty GeoJSON is a valid FeatureCollection") {
  std::ostringstream out;
  emit_geojson({}, out);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc["type"] == "FeatureCollection");
  CHECK(doc["features"].empty());
}

TEST_CASE("GeoJSON structure and colours") {
  const std::vector<DangerRecord> records = {
      {test::division("A", 19.5, 72.25, 100, 10), 0.36},
      {test::division("B \"quoted\"", -3.0, 150.0, 50, 5), 0.15},
      {test::division("C", 0.0, -0.78, 0, 0), 0.0},
  };
  const auto features = make_features(records, Normalization::Cap, 0.3);
  std::ostringstream out;
  emit_geojson(features, out);
  const auto doc = nlohmann::json::parse(out.str());
  REQUIRE(doc["features"].size() == 3);

  const auto& a = doc["features"][0];
  CHECK(a["type"] == "Feature");
  CHECK(a["geometry"]["type"] == "Point");
  CHECK(a["geometry"]["coordinates"][0] == 72.25);
  CHECK(a["geometry"]["coordinates"][1] == 19.5);
  CHECK(a["properties"]["division"] == "A");
  CHECK(a["properties"]["parent"] == "Testland");
  CHECK(a["properties"]["active"] == 100);
  CHECK(a["properties"]["danger_raw"] == 0.36);
  CHECK(a["properties"]["danger_norm"] == 1.0);
  CHECK(a["properties"]["color"] == "#FF0000");

  CHECK(doc["features"][1]["properties"]["division"] == "B \"quoted\"");
  CHECK(doc["features"][1]["properties"]["color"] == "#FFA500");
  CHECK(doc["features"][2]["properties"]["color"] == "#00FF00");
}

TEST_CASE("GeoJSON round trip and byte stability") {
  std::mt19937_64 rng(71);
  const auto features = sample_features(rng, 50);
  std::ostringstream first, second;
  emit_geojson(features, first);
  emit_geojson(features, second);
  CHECK(first.str() == second.str());

  const auto doc = nlohmann::json::parse(first.str());
  REQUIRE(doc["features"].size() == features.size());
  std::vector<RiskFeature> parsed;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& p = doc["features"][i]["properties"];
    const auto& c = doc["features"][i]["geometry"]["coordinates"];
    CHECK(p["division"] == features[i].key.division);
    CHECK(p["active"] == features[i].active);
    CHECK(p["danger_raw"].get<double>() == doctest::Approx(features[i].danger_raw).epsilon(1e-8));
    CHECK(p["color"] == to_hex(features[i].color));
    const double norm = p["danger_norm"];
    CHECK(norm >= 0.0);
    CHECK(norm <= 1.0);
    parsed.push_back({{p["division"], p["parent"]},
                      {c[1], c[0]},
                      p["active"],
                      p["danger_raw"],
                      norm,
                      features[i].color});
  }
  // Values already at 9 significant digits are re-emitted unchanged.
  std::ostringstream again;
  emit_geojson(parsed, again);
  CHECK(again.str() == first.str());
}

TEST_CASE("HTML output") {
  std::ostringstream empty;
  emit_html({}, empty);
  CHECK(empty.str().starts_with("<!DOCTYPE html>"));
  CHECK(count_of(empty.str(), "<circle") == 0);
  CHECK(empty.str().find("</html>") != std::string::npos);

  std::mt19937_64 rng(73);
  auto features = sample_features(rng, 25);
  features[0].key.division = "<script>alert(1)</script>";
  std::ostringstream html, geo;
  emit_html(features, html);
  emit_geojson(features, geo);
  const auto page = html.str();
  CHECK(count_of(page, "<circle") == 25);
  CHECK(page.find("<script>") == std::string::npos);
  CHECK(page.find("http://") == page.find("http://www.w3.org/2000/svg"));
  CHECK(page.find("https://") == std::string::npos);
  for (const auto* stop : {"#00FF00", "#FFA500", "#FF0000"}) CHECK(page.find(stop) != std::string::npos);

  // Circle colours match the GeoJSON colours, feature by feature.
  const std::regex fill("<circle [^>]*fill=\"(#[0-9A-F]{6})\"");
  std::vector<std::string> html_colors;
  for (std::sregex_iterator it(page.begin(), page.end(), fill), end; it != end; ++it) {
    html_colors.push_back((*it)[1]);
  }
  const auto doc = nlohmann::json::parse(geo.str());
  REQUIRE(html_colors.size() == doc["features"].size());
  for (std::size_t i = 0; i < html_colors.size(); ++i) {
    CHECK(html_colors[i] == doc["features"][i]["properties"]["color"]);
  }
}

TEST_CASE("failed sink is an I/O error") {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  CHECK_THROWS_AS(emit_geojson({}, out), IoError);
  CHECK_THROWS_AS(emit_html({}, out), IoError);
}

TEST_CASE("normalization names") {
  CHECK(parse_normalization("iqr") == Normalization::Iqr);
  CHECK_THROWS_AS(parse_normalization("zscore"), ConfigError);
}

}  // TEST_SUITE
