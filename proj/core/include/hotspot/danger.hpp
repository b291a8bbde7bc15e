#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "hotspot/geograph.hpp"
#include "hotspot/types.hpp"

namespace hotspot {

/// How neighbouring caseloads are turned into a danger level.
enum class Measure {
  /// Mean distance-scaled impact of the neighbours, excluding the node itself.
  Nwos,
  /// As Nwos, plus the node's own growth-weighted impact.
  Nws,
  /// Mean inverse-square interaction between the node and each neighbour.
  Isl,
};

std::string_view to_string(Measure measure) noexcept;
/// Accepts "nwos", "nws" and "isl". Throws ConfigError.
Measure parse_measure(std::string_view text);

/// Node weights divided by the largest node weight, and edge weights divided
/// by the longest realised edge. `edge` is laid out parallel to
/// EpiGraph::neighbors(i).
struct WeightScales {
  std::vector<double> node;
  std::vector<std::vector<double>> edge;
  double max_v = 0.0;
  double max_e = 0.0;
};

/// If every node has zero cases all node scales are 0. Edge scales lie in
/// (0, 1]; a graph without edges has max_e = 0.
WeightScales scale_weights(const EpiGraph& graph);

/// Impact of neighbour `j` on `i`: node_scale(j) / edge_scale(i, j).
/// Throws ContractError if (i, j) is not an edge.
double impact(const EpiGraph& graph, const WeightScales& scales, std::size_t i, std::size_t j);

/// Impact of a node on itself: its node scale times the growth factor
/// 1 + delta/active, floored at 0. Zero when the node has no active cases.
double impact_self(const EpiGraph& graph, const WeightScales& scales, std::size_t i);

/// Inverse-square interaction term between `i` and neighbour `j`:
/// node_scale(i) * node_scale(j) / edge_scale(i, j)^2. Symmetric in i and j.
double impact_isl(const EpiGraph& graph, const WeightScales& scales, std::size_t i,
                  std::size_t j);

/// Per-node danger levels. Isolated nodes score 0 under Nwos and Isl, and
/// their self impact under Nws.
double d_nwos(const EpiGraph& graph, const WeightScales& scales, std::size_t i);
double d_nws(const EpiGraph& graph, const WeightScales& scales, std::size_t i);
double d_isl(const EpiGraph& graph, const WeightScales& scales, std::size_t i);

struct DangerEntry {
  DivisionKey key;
  double value = 0.0;
};

/// Raw danger for every node of a graph, in node order.
struct DangerVector {
  Measure measure = Measure::Nwos;
  std::vector<DangerEntry> entries;
  double max_v = 0.0;
  double max_e = 0.0;

  std::vector<double> values() const;
};

/// Scores every node. Each node sums over its neighbours in DivisionKey
/// order, so results are bit-identical however the work is split.
DangerVector score_all(const EpiGraph& graph, Measure measure);

}  // namespace hotspot
