#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hotspot/danger.hpp"
#include "hotspot/types.hpp"

namespace hotspot {

inline constexpr double kDefaultCap = 0.3;

enum class Normalization { Cap, Iqr };

std::string_view to_string(Normalization mode) noexcept;
/// Accepts "cap" and "iqr". Throws ConfigError.
Normalization parse_normalization(std::string_view text);

/// min(raw, cap) / cap for every value. Throws ConfigError if cap <= 0.
std::vector<double> normalize_cap(std::span<const double> raw, double cap);

/// Quantile with linear interpolation between order statistics of `sorted`.
double quantile_linear(std::span<const double> sorted, double p);

/// Clamps each value into [Q1, Q3] and rescales that interval to [0, 1].
/// All zeros when Q1 == Q3. Throws ContractError on empty input.
std::vector<double> normalize_iqr(std::span<const double> raw);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// "#RRGGBB", upper-case hex.
std::string to_hex(Rgb color);

/// Green (0) through orange (0.5) to red (1), linear per channel between
/// stops, rounded half-up. Throws ContractError outside [0, 1].
Rgb gradient(double t);

struct RiskFeature {
  DivisionKey key;
  GeoPoint point;
  std::int64_t active = 0;
  double danger_raw = 0.0;
  double danger_norm = 0.0;
  Rgb color;
};

/// Raw danger values for each division alongside the attributes a map needs.
struct DangerRecord {
  Division division;
  double danger = 0.0;
};

/// Normalizes and colours every record. `cap` is ignored in iqr mode.
std::vector<RiskFeature> make_features(std::span<const DangerRecord> records, Normalization mode,
                                       double cap = kDefaultCap);

/// `%.9g` formatting used by every emitted number.
std::string format_number(double value);

/// Writes an RFC 7946 FeatureCollection of Point features. Output depends
/// only on the input values. Throws IoError if the stream fails.
void emit_geojson(std::span<const RiskFeature> features, std::ostream& sink);

/// Writes a self-contained HTML page with one SVG circle per feature on an
/// equirectangular projection, plus a three-stop legend.
void emit_html(std::span<const RiskFeature> features, std::ostream& sink);

}  // namespace hotspot
