#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hotspot {

/// Latitude/longitude in decimal degrees.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool valid() const noexcept;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Throws DataError if the point lies outside [-90,90] x [-180,180] or is NaN.
void require_valid(const GeoPoint& point);

/// Identity of an administrative division, e.g. a district within a state.
struct DivisionKey {
  std::string division;
  std::string parent;

  friend auto operator<=>(const DivisionKey&, const DivisionKey&) = default;
  friend bool operator==(const DivisionKey&, const DivisionKey&) = default;
};

/// "division|parent", the textual form used by the coordinate cache and the
/// graph file.
std::string to_string(const DivisionKey& key);

/// Inverse of to_string. Throws DataError when there is no separator.
DivisionKey parse_key(std::string_view text);

std::string_view trim(std::string_view text) noexcept;

/// Trimmed, ASCII-lowercased copy. Two keys refer to the same division iff
/// their normalized forms are equal.
std::string normalize_name(std::string_view text);
DivisionKey normalize(const DivisionKey& key);

struct InfectionRecord {
  DivisionKey key;
  std::int64_t active = 0;
  std::int64_t delta_active = 0;

  friend bool operator==(const InfectionRecord&, const InfectionRecord&) = default;
};

struct Division {
  DivisionKey key;
  GeoPoint point;
  std::int64_t active = 0;
  std::int64_t delta_active = 0;

  friend bool operator==(const Division&, const Division&) = default;
};

}  // namespace hotspot
