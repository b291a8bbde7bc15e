#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hotspot/types.hpp"

namespace hotspot {

enum class Metric {
  /// Planar distance in raw degree space.
  DegreeEuclidean,
  /// Great-circle distance in kilometres on a sphere of radius 6371 km.
  HaversineKm,
};

inline constexpr double kEarthRadiusKm = 6371.0;

std::string_view to_string(Metric metric) noexcept;
/// Accepts "degree-euclidean" and "haversine-km". Throws ConfigError.
Metric parse_metric(std::string_view text);

double distance(const GeoPoint& a, const GeoPoint& b, Metric metric) noexcept;

/// Undirected edge between node indices `a < b`.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double dist = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Sorted by (a, b); each pair appears once.
using EdgeSet = std::vector<Edge>;

/// Two centres closer than this are treated as the same point.
inline constexpr double kCoincidenceEpsilon = 1e-9;

/// Every pair (i, j), i < j, with distance <= threshold, found by checking
/// all pairs. Throws DataError if two divisions coincide.
EdgeSet brute_force_neighbors(std::span<const Division> divisions, double threshold,
                              Metric metric);

/// Same edge set as brute_force_neighbors, found through a uniform grid with
/// cells at least one threshold wide so each point only inspects adjacent
/// cells. Under haversine-km the longitude sweep widens with latitude and
/// wraps across the antimeridian.
EdgeSet grid_neighbors(std::span<const Division> divisions, double threshold, Metric metric);

/// Immutable weighted graph of divisions.
///
/// Node weight is the active case count; edge weight is the centre-to-centre
/// distance, always in (0, threshold]. Each node's neighbour list is sorted
/// by DivisionKey, which fixes the summation order used by the scorers.
class EpiGraph {
public:
  struct Neighbor {
    std::size_t node;
    double dist;
  };

  /// Builds the graph with grid_neighbors. Throws ContractError for a
  /// non-positive threshold and DataError for invalid coordinates or
  /// coincident centres.
  static EpiGraph build(std::vector<Division> divisions, double threshold, Metric metric);

  /// Assembles a graph from an explicit edge list, validating that every
  /// edge references distinct existing nodes, appears once, and has weight
  /// in (0, threshold]. Used when reading a graph file.
  static EpiGraph from_edges(std::vector<Division> divisions, EdgeSet edges, double threshold,
                             Metric metric);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Division>& nodes() const noexcept { return nodes_; }
  const Division& node(std::size_t i) const { return nodes_.at(i); }
  const EdgeSet& edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_.at(i); }
  double threshold() const noexcept { return threshold_; }
  Metric metric() const noexcept { return metric_; }

private:
  EpiGraph(std::vector<Division> divisions, EdgeSet edges, double threshold, Metric metric);

  std::vector<Division> nodes_;
  EdgeSet edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  double threshold_;
  Metric metric_;
};

}  // namespace hotspot
