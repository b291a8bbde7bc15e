#pragma once

// Shared fixtures, random instance generators and independent oracles for
// the test suites. Nothing here calls into the scoring code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hotspot/geograph.hpp"
#include "hotspot/types.hpp"

namespace hotspot::test {

inline std::filesystem::path data_dir() { return HOTSPOT_TEST_DATA_DIR; }

/// Fresh empty directory under the build tree for file-producing tests.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::path(HOTSPOT_TEST_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Division division(std::string name, double lat, double lon, std::int64_t active,
                         std::int64_t delta = 0) {
  return {{std::move(name), "Testland"}, {lat, lon}, active, delta};
}

/// Three divisions with AB = 1.0, AC = 1.2 and BC = 2.0 degrees apart,
/// V = {100, 50, 0} and delta V = {10, 5, 0}.
inline std::vector<Division> triangle() {
  return {division("A", 0.0, 0.0, 100, 10), division("B", 0.0, 1.0, 50, 5),
          division("C", 0.9119210492142398, -0.78, 0, 0)};
}

/// The same triangle as an explicit edge list with exact weights.
inline EdgeSet triangle_edges() { return {{0, 1, 1.0}, {0, 2, 1.2}}; }

/// Uniform random divisions in a lat/lon box with distinct names.
inline std::vector<Division> random_divisions(std::mt19937_64& rng, std::size_t n, double lat_lo,
                                              double lat_hi, double lon_lo, double lon_hi,
                                              std::int64_t max_active = 10000) {
  std::uniform_real_distribution<double> lat(lat_lo, lat_hi);
  std::uniform_real_distribution<double> lon(lon_lo, lon_hi);
  std::uniform_int_distribution<std::int64_t> active(0, max_active);
  std::vector<Division> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = active(rng);
    std::uniform_int_distribution<std::int64_t> delta(-a, a);
    out.push_back({{"d" + std::to_string(i), "p" + std::to_string(i % 7)},
                   {lat(rng), lon(rng)},
                   a,
                   delta(rng)});
  }
  return out;
}

/// Random divisions packed around a few centres.
inline std::vector<Division> clustered_divisions(std::mt19937_64& rng, std::size_t n,
                                                 std::size_t clusters, double spread) {
  std::uniform_real_distribution<double> centre_lat(-60, 60);
  std::uniform_real_distribution<double> centre_lon(-170, 170);
  std::normal_distribution<double> jitter(0.0, spread);
  std::uniform_int_distribution<std::int64_t> active(0, 5000);
  std::vector<GeoPoint> centres;
  for (std::size_t c = 0; c < clusters; ++c) centres.push_back({centre_lat(rng), centre_lon(rng)});
  std::vector<Division> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centres[i % clusters];
    GeoPoint p{std::clamp(c.lat + jitter(rng), -90.0, 90.0),
               std::clamp(c.lon + jitter(rng), -180.0, 180.0)};
    out.push_back({{"c" + std::to_string(i), "k"}, p, active(rng), 0});
  }
  return out;
}

/// Dense evaluation of the three danger measures straight from a symmetric
/// distance matrix, where 0 means "no edge". Written without the graph
/// types so it can serve as an oracle for them.
struct DenseDanger {
  std::vector<double> nwos, nws, isl;
};

inline DenseDanger dense_danger(const std::vector<double>& v, const std::vector<double>& dv,
                                const std::vector<std::vector<double>>& dist) {
  const std::size_t n = v.size();
  double max_v = 0, max_e = 0;
  for (double x : v) max_v = std::max(max_v, x);
  for (const auto& row : dist)
    for (double d : row) max_e = std::max(max_e, d);
  auto vs = [&](std::size_t k) { return max_v > 0 ? v[k] / max_v : 0.0; };

  DenseDanger out;
  for (std::size_t i = 0; i < n; ++i) {
    double s1 = 0, s3 = 0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (dist[i][j] == 0) continue;
      const double es = dist[i][j] / max_e;
      s1 += vs(j) / es;
      s3 += vs(i) * vs(j) / (es * es);
      ++count;
    }
    const double self = v[i] == 0 ? 0.0 : vs(i) * std::max(0.0, 1.0 + dv[i] / v[i]);
    out.nwos.push_back(count ? s1 / count : 0.0);
    out.nws.push_back((s1 + self) / (count + 1));
    out.isl.push_back(count ? s3 / count : 0.0);
  }
  return out;
}

}  // namespace hotspot::test
