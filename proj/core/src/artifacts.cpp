#include "hotspot/artifacts.hpp"

#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "hotspot/error.hpp"

namespace hotspot {

using nlohmann::ordered_json;

namespace {

ordered_json parse_document(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw DataError(fmt::format("malformed {} file: {}", what, e.what()));
  }
}

template <typename T>
T field(const ordered_json& obj, const char* name, std::string_view what) {
  const auto it = obj.find(name);
  if (it == obj.end()) throw DataError(fmt::format("{} entry lacks '{}'", what, name));
  try {
    return it->get<T>();
  } catch (const ordered_json::exception&) {
    throw DataError(fmt::format("{} entry has a bad '{}' value", what, name));
  }
}

Division read_division(const ordered_json& j, std::string_view what) {
  Division d;
  d.key = {field<std::string>(j, "division", what), field<std::string>(j, "parent", what)};
  d.point = {field<double>(j, "lat", what), field<double>(j, "lon", what)};
  d.active = field<std::int64_t>(j, "active", what);
  d.delta_active = field<std::int64_t>(j, "delta", what);
  require_valid(d.point);
  if (d.active < 0) throw DataError(fmt::format("{} '{}' has negative active count", what,
                                                to_string(d.key)));
  return d;
}

ordered_json division_json(const Division& d) {
  return {{"division", d.key.division}, {"parent", d.key.parent}, {"lat", d.point.lat},
          {"lon", d.point.lon},         {"active", d.active},     {"delta", d.delta_active}};
}

}  // namespace

void write_graph_json(const EpiGraph& graph, std::ostream& sink) {
  ordered_json nodes = ordered_json::array();
  for (const auto& d : graph.nodes()) {
    ordered_json n = {{"id", to_string(d.key)}};
    n.update(division_json(d));
    nodes.push_back(std::move(n));
  }
  ordered_json edges = ordered_json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"a", to_string(graph.node(e.a).key)},
                     {"b", to_string(graph.node(e.b).key)},
                     {"dist", e.dist}});
  }
  ordered_json doc = {{"nodes", std::move(nodes)},
                      {"edges", std::move(edges)},
                      {"threshold", graph.threshold()},
                      {"metric", std::string(to_string(graph.metric()))}};
  sink << doc.dump(1) << '\n';
  if (!sink) throw IoError("failed writing graph file");
}

EpiGraph read_graph_json(std::string_view text) {
  const auto doc = parse_document(text, "graph");
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
    throw DataError("graph file needs 'nodes' and 'edges'");
  }
  const auto threshold = field<double>(doc, "threshold", "graph");
  const auto metric = parse_metric(field<std::string>(doc, "metric", "graph"));

  std::vector<Division> nodes;
  std::map<std::string, std::size_t> index;
  for (const auto& n : doc["nodes"]) {
    auto d = read_division(n, "node");
    const auto id = field<std::string>(n, "id", "node");
    if (!index.emplace(id, nodes.size()).second) {
      throw DataError(fmt::format("node id '{}' repeated", id));
    }
    nodes.push_back(std::move(d));
  }
  auto lookup = [&](const std::string& id) {
    const auto it = index.find(id);
    if (it == index.end()) throw DataError(fmt::format("edge references unknown node '{}'", id));
    return it->second;
  };
  EdgeSet edges;
  for (const auto& e : doc["edges"]) {
    edges.push_back({lookup(field<std::string>(e, "a", "edge")),
                     lookup(field<std::string>(e, "b", "edge")), field<double>(e, "dist", "edge")});
  }
  return EpiGraph::from_edges(std::move(nodes), std::move(edges), threshold, metric);
}

std::vector<DangerRecord> danger_records(const EpiGraph& graph, const DangerVector& danger) {
  if (danger.entries.size() != graph.node_count()) {
    throw ContractError("danger vector does not match graph");
  }
  std::vector<DangerRecord> out;
  out.reserve(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    out.push_back({graph.node(i), danger.entries[i].value});
  }
  return out;
}

void write_danger_json(const EpiGraph& graph, const DangerVector& danger, std::ostream& sink) {
  ordered_json divisions = ordered_json::array();
  for (const auto& r : danger_records(graph, danger)) {
    auto j = division_json(r.division);
    j["danger"] = r.danger;
    divisions.push_back(std::move(j));
  }
  ordered_json doc = {{"measure", std::string(to_string(danger.measure))},
                      {"max_v", danger.max_v},
                      {"max_e", danger.max_e},
                      {"divisions", std::move(divisions)}};
  sink << doc.dump(1) << '\n';
  if (!sink) throw IoError("failed writing danger file");
}

DangerFile read_danger_json(std::string_view text) {
  const auto doc = parse_document(text, "danger");
  if (!doc.is_object() || !doc.contains("divisions")) {
    throw DataError("danger file needs 'divisions'");
  }
  DangerFile out;
  out.measure = parse_measure(field<std::string>(doc, "measure", "danger"));
  out.max_v = field<double>(doc, "max_v", "danger");
  out.max_e = field<double>(doc, "max_e", "danger");
  for (const auto& j : doc["divisions"]) {
    out.records.push_back({read_division(j, "division"), field<double>(j, "danger", "division")});
  }
  return out;
}

}  // namespace hotspot
