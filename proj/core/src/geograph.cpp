#include "hotspot/geograph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>

#include <fmt/format.h>

#include "hotspot/error.hpp"

namespace hotspot {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
// Slightly less than the true length of one degree of arc (111.1949 km), so
// a latitude row sized from it is never narrower than the threshold.
constexpr double kKmPerDegreeFloor = 111.19;
constexpr double kMaxLonWidening = 5.0;
constexpr double kCellSlack = 1.0 + 1e-9;

[[noreturn]] void throw_coincident(std::span<const Division> divisions, std::size_t i,
                                   std::size_t j) {
  const auto& a = divisions[i].key;
  const auto& b = divisions[j].key;
  throw DataError(fmt::format("divisions '{}, {}' and '{}, {}' have coincident centres",
                              a.division, a.parent, b.division, b.parent));
}

/// Keeps the lexicographically first coincident pair so the grid and the
/// brute-force scan report the same one.
struct CoincidenceTracker {
  std::optional<std::pair<std::size_t, std::size_t>> first;

  void note(std::size_t i, std::size_t j) {
    if (!first || std::pair{i, j} < *first) first = std::pair{i, j};
  }

  void raise_if_any(std::span<const Division> divisions) const {
    if (first) throw_coincident(divisions, first->first, first->second);
  }
};

void check_threshold(double threshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw ContractError(fmt::format("threshold must be positive and finite, got {}", threshold));
  }
}

/// Grid cells keyed by (row, col). Points are stored contiguously per cell.
class CellIndex {
public:
  using Key = std::pair<std::int64_t, std::int64_t>;

  CellIndex(std::vector<Key> keys) : keys_(std::move(keys)), order_(keys_.size()) {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      return std::pair{keys_[x], x} < std::pair{keys_[y], y};
    });
    for (std::size_t pos = 0; pos < order_.size();) {
      auto end = pos;
      while (end < order_.size() && keys_[order_[end]] == keys_[order_[pos]]) ++end;
      cells_.emplace(keys_[order_[pos]], std::pair{pos, end});
      pos = end;
    }
  }

  const Key& key_of(std::size_t point) const { return keys_[point]; }

  template <typename Fn>
  void for_each_in(const Key& cell, Fn&& fn) const {
    const auto it = cells_.find(cell);
    if (it == cells_.end()) return;
    for (auto pos = it->second.first; pos < it->second.second; ++pos) fn(order_[pos]);
  }

private:
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      const auto h1 = std::hash<std::int64_t>{}(k.first);
      const auto h2 = std::hash<std::int64_t>{}(k.second);
      return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
    }
  };

  std::vector<Key> keys_;
  std::vector<std::size_t> order_;
  std::unordered_map<Key, std::pair<std::size_t, std::size_t>, KeyHash> cells_;
};

std::int64_t cell_of(double coordinate, double size) {
  return static_cast<std::int64_t>(std::floor(coordinate / size));
}

EdgeSet grid_planar(std::span<const Division> divisions, double threshold,
                    CoincidenceTracker& coincident) {
  const double cell = std::max(threshold, kCoincidenceEpsilon) * kCellSlack;
  std::vector<CellIndex::Key> keys;
  keys.reserve(divisions.size());
  for (const auto& d : divisions) {
    keys.emplace_back(cell_of(d.point.lat, cell), cell_of(d.point.lon, cell));
  }
  const CellIndex index(std::move(keys));

  EdgeSet edges;
  for (std::size_t i = 0; i < divisions.size(); ++i) {
    const auto [row, col] = index.key_of(i);
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
      for (std::int64_t dc = -1; dc <= 1; ++dc) {
        index.for_each_in({row + dr, col + dc}, [&](std::size_t j) {
          if (j <= i) return;
          const double d = distance(divisions[i].point, divisions[j].point,
                                    Metric::DegreeEuclidean);
          if (d < kCoincidenceEpsilon) coincident.note(i, j);
          if (d <= threshold) edges.push_back({i, j, d});
        });
      }
    }
  }
  return edges;
}

EdgeSet grid_spherical(std::span<const Division> divisions, double threshold,
                       CoincidenceTracker& coincident) {
  const double reach_km = std::max(threshold, kCoincidenceEpsilon);
  const double row_height = std::min(reach_km / kKmPerDegreeFloor * kCellSlack, 180.0);

  double max_abs_lat = 0.0;
  for (const auto& d : divisions) max_abs_lat = std::max(max_abs_lat, std::abs(d.point.lat));
  const double widening =
      std::min(kMaxLonWidening, 1.0 / std::cos(std::min(max_abs_lat, 89.0) * kDegToRad));
  const auto col_count = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(360.0 / (row_height * widening))));
  const double col_width = 360.0 / static_cast<double>(col_count);

  auto col_of = [&](double lon) {
    return cell_of(lon + 180.0, col_width) % col_count;
  };

  std::vector<CellIndex::Key> keys;
  keys.reserve(divisions.size());
  for (const auto& d : divisions) {
    keys.emplace_back(cell_of(d.point.lat + 90.0, row_height), col_of(d.point.lon));
  }
  const CellIndex index(std::move(keys));

  const double angular_reach = reach_km / kEarthRadiusKm;
  EdgeSet edges;
  for (std::size_t i = 0; i < divisions.size(); ++i) {
    const double lat = std::abs(divisions[i].point.lat) * kDegToRad;
    // Widest longitude offset any point within reach can have.
    double lon_reach = 180.0;
    if (angular_reach < std::numbers::pi / 2 - lat) {
      lon_reach = std::asin(std::sin(angular_reach) / std::cos(lat)) / kDegToRad;
    }
    lon_reach = lon_reach * kCellSlack + 1e-9;
    const auto span = static_cast<std::int64_t>(std::ceil(lon_reach / col_width));
    const bool whole_row = 2 * span + 1 >= col_count;

    const auto [row, col] = index.key_of(i);
    auto visit = [&](std::size_t j) {
      if (j <= i) return;
      const double d = distance(divisions[i].point, divisions[j].point, Metric::HaversineKm);
      if (d < kCoincidenceEpsilon) coincident.note(i, j);
      if (d <= threshold) edges.push_back({i, j, d});
    };
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
      if (whole_row) {
        for (std::int64_t c = 0; c < col_count; ++c) index.for_each_in({row + dr, c}, visit);
      } else {
        for (std::int64_t dc = -span; dc <= span; ++dc) {
          const auto c = ((col + dc) % col_count + col_count) % col_count;
          index.for_each_in({row + dr, c}, visit);
        }
      }
    }
  }
  return edges;
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::DegreeEuclidean:
      return "degree-euclidean";
    case Metric::HaversineKm:
      return "haversine-km";
  }
  return "unknown";
}

Metric parse_metric(std::string_view text) {
  if (text == "degree-euclidean") return Metric::DegreeEuclidean;
  if (text == "haversine-km") return Metric::HaversineKm;
  throw ConfigError(
      fmt::format("unknown metric '{}' (expected degree-euclidean or haversine-km)", text));
}

double distance(const GeoPoint& a, const GeoPoint& b, Metric metric) noexcept {
  if (metric == Metric::DegreeEuclidean) {
    const double dlat = a.lat - b.lat;
    const double dlon = a.lon - b.lon;
    return std::sqrt(dlat * dlat + dlon * dlon);
  }
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double s_lat = std::sin((lat2 - lat1) / 2.0);
  const double s_lon = std::sin((b.lon - a.lon) * kDegToRad / 2.0);
  const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

EdgeSet brute_force_neighbors(std::span<const Division> divisions, double threshold,
                              Metric metric) {
  EdgeSet edges;
  for (std::size_t i = 0; i < divisions.size(); ++i) {
    for (std::size_t j = i + 1; j < divisions.size(); ++j) {
      const double d = distance(divisions[i].point, divisions[j].point, metric);
      if (d < kCoincidenceEpsilon) throw_coincident(divisions, i, j);
      if (d <= threshold) edges.push_back({i, j, d});
    }
  }
  return edges;
}

EdgeSet grid_neighbors(std::span<const Division> divisions, double threshold, Metric metric) {
  check_threshold(threshold);
  CoincidenceTracker coincident;
  auto edges = metric == Metric::DegreeEuclidean
                   ? grid_planar(divisions, threshold, coincident)
                   : grid_spherical(divisions, threshold, coincident);
  coincident.raise_if_any(divisions);
  std::sort(edges.begin(), edges.end());
  return edges;
}

// EpiGraph

EpiGraph::EpiGraph(std::vector<Division> divisions, EdgeSet edges, double threshold,
                   Metric metric)
    : nodes_(std::move(divisions)),
      edges_(std::move(edges)),
      adjacency_(nodes_.size()),
      threshold_(threshold),
      metric_(metric) {
  for (const auto& e : edges_) {
    adjacency_[e.a].push_back({e.b, e.dist});
    adjacency_[e.b].push_back({e.a, e.dist});
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(), [&](const Neighbor& x, const Neighbor& y) {
      return nodes_[x.node].key < nodes_[y.node].key;
    });
  }
}

namespace {

void validate_nodes(const std::vector<Division>& divisions) {
  std::set<DivisionKey> seen;
  for (const auto& d : divisions) {
    require_valid(d.point);
    if (!seen.insert(normalize(d.key)).second) {
      throw DataError(fmt::format("division '{}, {}' appears twice", d.key.division,
                                  d.key.parent));
    }
  }
}

}  // namespace

EpiGraph EpiGraph::build(std::vector<Division> divisions, double threshold, Metric metric) {
  check_threshold(threshold);
  validate_nodes(divisions);
  auto edges = grid_neighbors(divisions, threshold, metric);
  return EpiGraph(std::move(divisions), std::move(edges), threshold, metric);
}

EpiGraph EpiGraph::from_edges(std::vector<Division> divisions, EdgeSet edges, double threshold,
                              Metric metric) {
  check_threshold(threshold);
  validate_nodes(divisions);
  for (auto& e : edges) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.b >= divisions.size()) {
      throw DataError(fmt::format("edge ({}, {}) references a missing node", e.a, e.b));
    }
    if (e.a == e.b) throw DataError(fmt::format("self-loop on node {}", e.a));
    if (!(e.dist > 0.0) || e.dist > threshold) {
      throw DataError(fmt::format("edge ({}, {}) has weight {} outside (0, {}]", e.a, e.b,
                                  e.dist, threshold));
    }
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.a == y.a && x.b == y.b;
  });
  if (dup != edges.end()) {
    throw DataError(fmt::format("edge ({}, {}) listed more than once", dup->a, dup->b));
  }
  return EpiGraph(std::move(divisions), std::move(edges), threshold, metric);
}

}  // namespace hotspot
