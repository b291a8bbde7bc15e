#include "hotspot/ingest.hpp"

#include <array>
#include <charconv>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "hotspot/error.hpp"

namespace hotspot {
namespace {

constexpr std::array<std::string_view, 3> kPlaceholders = {"unassigned", "unknown", "other"};

/// Minimal RFC 4180 reader. Returns nullopt at end of input.
class DelimitedReader {
public:
  DelimitedReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

  std::optional<std::vector<std::string>> next() {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    char c = 0;
    while (in_.get(c)) {
      any = true;
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get(c);
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        quoted = true;
      } else if (c == delimiter_) {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        ++line_;
        fields.push_back(std::move(field));
        return strip_cr(std::move(fields));
      } else {
        field.push_back(c);
      }
    }
    if (!any) return std::nullopt;
    fields.push_back(std::move(field));
    return strip_cr(std::move(fields));
  }

  /// Line number on which the most recently returned record started.
  std::size_t record_line() const noexcept { return record_line_; }

  void mark() noexcept { record_line_ = line_ + 1; }

private:
  static std::vector<std::string> strip_cr(std::vector<std::string> fields) {
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
      fields.back().pop_back();
    }
    return fields;
  }

  std::istream& in_;
  char delimiter_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 1;
};

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == trim(name)) return i;
  }
  throw SchemaError(fmt::format("required column '{}' not found in header", name));
}

std::int64_t parse_count(std::string_view cell, std::size_t line, std::string_view column,
                         bool allow_negative) {
  const auto text = trim(cell);
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(line, fmt::format("column '{}': '{}' is not an integer", column, cell));
  }
  if (!allow_negative && value < 0) {
    throw ParseError(line, fmt::format("column '{}': count {} is negative", column, value));
  }
  return value;
}

bool keep(const DivisionKey& key) {
  return !key.division.empty() && !key.parent.empty() && !is_placeholder_name(key.division);
}

}  // namespace

bool is_placeholder_name(std::string_view name) {
  const auto norm = normalize_name(name);
  for (auto p : kPlaceholders) {
    if (norm == p) return true;
  }
  return false;
}

LoadedTable load_infection_table(std::istream& source, const TableSchema& schema) {
  DelimitedReader reader(source, schema.delimiter);
  reader.mark();
  auto header = reader.next();
  if (!header || (header->size() == 1 && trim((*header)[0]).empty())) {
    throw SchemaError("table has no header row");
  }
  const auto parent_col = column_index(*header, schema.parent);
  const auto division_col = column_index(*header, schema.division);
  const auto active_col = column_index(*header, schema.active);
  const auto delta_col = column_index(*header, schema.delta_active);

  LoadedTable out;
  std::set<DivisionKey> seen;
  for (;;) {
    reader.mark();
    auto row = reader.next();
    if (!row) break;
    const auto line = reader.record_line();
    if (row->size() == 1 && trim((*row)[0]).empty()) continue;  // blank line
    if (row->size() != header->size()) {
      throw ParseError(line, fmt::format("expected {} fields, found {}", header->size(),
                                         row->size()));
    }
    DivisionKey key{std::string(trim((*row)[division_col])),
                    std::string(trim((*row)[parent_col]))};
    if (!keep(key)) {
      ++out.dropped_rows;
      continue;
    }
    const auto active = parse_count((*row)[active_col], line, schema.active, false);
    const auto delta = parse_count((*row)[delta_col], line, schema.delta_active, true);
    if (!seen.insert(normalize(key)).second) {
      throw DataError(fmt::format("line {}: duplicate division '{}, {}'", line, key.division,
                                  key.parent));
    }
    out.records.push_back({std::move(key), active, delta});
  }
  return out;
}

std::vector<InfectionRecord> clean_records(std::vector<InfectionRecord> records) {
  std::vector<InfectionRecord> out;
  out.reserve(records.size());
  for (auto& r : records) {
    r.key.division = std::string(trim(r.key.division));
    r.key.parent = std::string(trim(r.key.parent));
    if (keep(r.key)) out.push_back(std::move(r));
  }
  return out;
}

MergeResult merge_coordinates(const std::vector<InfectionRecord>& records,
                              const std::map<DivisionKey, GeoPoint>& coords) {
  std::map<DivisionKey, GeoPoint> by_norm;
  for (const auto& [key, point] : coords) by_norm.emplace(normalize(key), point);

  MergeResult out;
  for (const auto& r : records) {
    const auto it = by_norm.find(normalize(r.key));
    if (it == by_norm.end()) {
      out.unresolved.push_back(r.key);
    } else {
      out.divisions.push_back({r.key, it->second, r.active, r.delta_active});
    }
  }
  return out;
}

}  // namespace hotspot
