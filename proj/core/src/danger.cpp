#include "hotspot/danger.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "hotspot/error.hpp"

namespace hotspot {
namespace {

std::size_t neighbor_slot(const EpiGraph& graph, std::size_t i, std::size_t j) {
  const auto list = graph.neighbors(i);
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (list[k].node == j) return k;
  }
  throw ContractError(fmt::format("nodes {} and {} are not adjacent", i, j));
}

double self_term(const Division& node, double node_scale) {
  if (node.active == 0) return 0.0;
  const double growth = 1.0 + static_cast<double>(node.delta_active) /
                                  static_cast<double>(node.active);
  return node_scale * std::max(0.0, growth);
}

double mean_or_zero(double sum, std::size_t count) {
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace

std::string_view to_string(Measure measure) noexcept {
  switch (measure) {
    case Measure::Nwos:
      return "nwos";
    case Measure::Nws:
      return "nws";
    case Measure::Isl:
      return "isl";
  }
  return "unknown";
}

Measure parse_measure(std::string_view text) {
  if (text == "nwos") return Measure::Nwos;
  if (text == "nws") return Measure::Nws;
  if (text == "isl") return Measure::Isl;
  throw ConfigError(fmt::format("unknown measure '{}' (expected nwos, nws or isl)", text));
}

WeightScales scale_weights(const EpiGraph& graph) {
  WeightScales s;
  for (const auto& n : graph.nodes()) s.max_v = std::max(s.max_v, static_cast<double>(n.active));
  for (const auto& e : graph.edges()) s.max_e = std::max(s.max_e, e.dist);

  s.node.reserve(graph.node_count());
  for (const auto& n : graph.nodes()) {
    s.node.push_back(s.max_v > 0.0 ? static_cast<double>(n.active) / s.max_v : 0.0);
  }
  s.edge.resize(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    for (const auto& nb : graph.neighbors(i)) s.edge[i].push_back(nb.dist / s.max_e);
  }
  return s;
}

double impact(const EpiGraph& graph, const WeightScales& scales, std::size_t i, std::size_t j) {
  const auto k = neighbor_slot(graph, i, j);
  return scales.node[j] / scales.edge[i][k];
}

double impact_self(const EpiGraph& graph, const WeightScales& scales, std::size_t i) {
  return self_term(graph.node(i), scales.node.at(i));
}

double impact_isl(const EpiGraph& graph, const WeightScales& scales, std::size_t i,
                  std::size_t j) {
  const auto k = neighbor_slot(graph, i, j);
  const double e = scales.edge[i][k];
  return scales.node[i] * scales.node[j] / (e * e);
}

double d_nwos(const EpiGraph& graph, const WeightScales& scales, std::size_t i) {
  const auto list = graph.neighbors(i);
  double sum = 0.0;
  for (std::size_t k = 0; k < list.size(); ++k) {
    sum += scales.node[list[k].node] / scales.edge[i][k];
  }
  return mean_or_zero(sum, list.size());
}

double d_nws(const EpiGraph& graph, const WeightScales& scales, std::size_t i) {
  const auto list = graph.neighbors(i);
  double sum = 0.0;
  for (std::size_t k = 0; k < list.size(); ++k) {
    sum += scales.node[list[k].node] / scales.edge[i][k];
  }
  sum += impact_self(graph, scales, i);
  return sum / static_cast<double>(list.size() + 1);
}

double d_isl(const EpiGraph& graph, const WeightScales& scales, std::size_t i) {
  const auto list = graph.neighbors(i);
  double sum = 0.0;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const double e = scales.edge[i][k];
    sum += scales.node[i] * scales.node[list[k].node] / (e * e);
  }
  return mean_or_zero(sum, list.size());
}

std::vector<double> DangerVector::values() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.value);
  return out;
}

DangerVector score_all(const EpiGraph& graph, Measure measure) {
  const auto scales = scale_weights(graph);
  DangerVector out{measure, {}, scales.max_v, scales.max_e};
  out.entries.reserve(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    double value = 0.0;
    switch (measure) {
      case Measure::Nwos:
        value = d_nwos(graph, scales, i);
        break;
      case Measure::Nws:
        value = d_nws(graph, scales, i);
        break;
      case Measure::Isl:
        value = d_isl(graph, scales, i);
        break;
    }
    out.entries.push_back({graph.node(i).key, value});
  }
  return out;
}

}  // namespace hotspot
