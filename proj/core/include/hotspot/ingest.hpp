#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "hotspot/types.hpp"

namespace hotspot {

/// Column names of the four fields the pipeline needs. Any other column in
/// the table is ignored.
struct TableSchema {
  std::string parent = "State";
  std::string division = "District";
  std::string active = "Active";
  std::string delta_active = "Delta_Active";
  char delimiter = ',';
};

struct LoadedTable {
  std::vector<InfectionRecord> records;
  /// Rows removed because the division or parent name was empty or a
  /// placeholder such as "Unknown".
  std::size_t dropped_rows = 0;
};

/// True for placeholder names the upstream data uses for cases it could not
/// attribute: "Unassigned", "Unknown", "Other" (case-insensitive, trimmed).
bool is_placeholder_name(std::string_view name);

/// Parses a delimiter-separated table with a header row. Quoted fields
/// ("a, b" and "" escapes) are supported.
///
/// Throws SchemaError if the header is absent or lacks a schema column,
/// ParseError for a non-integer or negative count, and DataError when two
/// retained rows name the same division.
LoadedTable load_infection_table(std::istream& source, const TableSchema& schema = {});

/// Trims names and drops records whose names are empty or placeholders.
/// Idempotent.
std::vector<InfectionRecord> clean_records(std::vector<InfectionRecord> records);

struct MergeResult {
  std::vector<Division> divisions;
  std::vector<DivisionKey> unresolved;
};

/// Attaches coordinates to records. Keys match case-insensitively after
/// trimming. Every record ends up in exactly one of the two output lists,
/// in input order.
MergeResult merge_coordinates(const std::vector<InfectionRecord>& records,
                              const std::map<DivisionKey, GeoPoint>& coords);

}  // namespace hotspot
