#pragma once

#include <ostream>
#include <string_view>
#include <vector>

#include "hotspot/danger.hpp"
#include "hotspot/geograph.hpp"
#include "hotspot/riskmap.hpp"

namespace hotspot {

// Intermediate files passed between pipeline stages. Numbers are written
// with shortest round-trip precision, so reading a file back reproduces the
// in-memory values exactly.

/// Node-link JSON:
/// {"nodes":[{"id","division","parent","lat","lon","active","delta"}],
///  "edges":[{"a","b","dist"}], "threshold": t, "metric": m}
/// where ids are "division|parent" and edges reference ids.
void write_graph_json(const EpiGraph& graph, std::ostream& sink);
EpiGraph read_graph_json(std::string_view text);

/// {"measure": m, "max_v": .., "max_e": .., "divisions":[{"division","parent",
///  "lat","lon","active","delta","danger"}]}
void write_danger_json(const EpiGraph& graph, const DangerVector& danger, std::ostream& sink);

struct DangerFile {
  Measure measure = Measure::Nwos;
  double max_v = 0.0;
  double max_e = 0.0;
  std::vector<DangerRecord> records;
};

DangerFile read_danger_json(std::string_view text);

/// Pairs graph nodes with their scores, in node order.
std::vector<DangerRecord> danger_records(const EpiGraph& graph, const DangerVector& danger);

}  // namespace hotspot
