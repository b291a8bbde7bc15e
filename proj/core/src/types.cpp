#include "hotspot/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "hotspot/error.hpp"

namespace hotspot {

bool GeoPoint::valid() const noexcept {
  return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

void require_valid(const GeoPoint& point) {
  if (!point.valid()) {
    throw DataError(fmt::format("coordinate ({}, {}) outside [-90,90] x [-180,180]",
                                point.lat, point.lon));
  }
}

std::string to_string(const DivisionKey& key) {
  return key.division + "|" + key.parent;
}

DivisionKey parse_key(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) {
    throw DataError(fmt::format("division key '{}' has no '|' separator", text));
  }
  return {std::string(text.substr(0, bar)), std::string(text.substr(bar + 1))};
}

std::string_view trim(std::string_view text) noexcept {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

std::string normalize_name(std::string_view text) {
  std::string out(trim(text));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

DivisionKey normalize(const DivisionKey& key) {
  return {normalize_name(key.division), normalize_name(key.parent)};
}

}  // namespace hotspot
