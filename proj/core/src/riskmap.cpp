#include "hotspot/riskmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "hotspot/error.hpp"

namespace hotspot {
namespace {

struct Stop {
  double t;
  double r, g, b;
};

constexpr std::array<Stop, 3> kStops = {{
    {0.0, 0, 255, 0},
    {0.5, 255, 165, 0},
    {1.0, 255, 0, 0},
}};

std::uint8_t round_half_up(double channel) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(channel + 0.5), 0.0, 255.0));
}

std::string json_string(std::string_view text) {
  return nlohmann::json(std::string(text)).dump();
}

std::string html_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void check_sink(const std::ostream& sink, std::string_view what) {
  if (!sink) throw IoError(fmt::format("failed writing {}", what));
}

}  // namespace

std::string_view to_string(Normalization mode) noexcept {
  return mode == Normalization::Cap ? "cap" : "iqr";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "cap") return Normalization::Cap;
  if (text == "iqr") return Normalization::Iqr;
  throw ConfigError(fmt::format("unknown normalization '{}' (expected cap or iqr)", text));
}

std::vector<double> normalize_cap(std::span<const double> raw, double cap) {
  if (!(cap > 0.0) || !std::isfinite(cap)) {
    throw ConfigError(fmt::format("cap must be positive, got {}", cap));
  }
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) out.push_back(std::min(v, cap) / cap);
  return out;
}

double quantile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ContractError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> normalize_iqr(std::span<const double> raw) {
  if (raw.empty()) throw ContractError("cannot normalize an empty danger vector");
  std::vector<double> sorted(raw.begin(), raw.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = quantile_linear(sorted, 0.25);
  const double q3 = quantile_linear(sorted, 0.75);
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) {
    out.push_back(q3 > q1 ? (std::clamp(v, q1, q3) - q1) / (q3 - q1) : 0.0);
  }
  return out;
}

std::string to_hex(Rgb color) {
  return fmt::format("#{:02X}{:02X}{:02X}", color.r, color.g, color.b);
}

Rgb gradient(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ContractError(fmt::format("gradient position {} outside [0, 1]", t));
  }
  const auto& lo = t <= kStops[1].t ? kStops[0] : kStops[1];
  const auto& hi = t <= kStops[1].t ? kStops[1] : kStops[2];
  const double f = (t - lo.t) / (hi.t - lo.t);
  return {round_half_up(lo.r + f * (hi.r - lo.r)), round_half_up(lo.g + f * (hi.g - lo.g)),
          round_half_up(lo.b + f * (hi.b - lo.b))};
}

std::vector<RiskFeature> make_features(std::span<const DangerRecord> records, Normalization mode,
                                       double cap) {
  std::vector<double> raw;
  raw.reserve(records.size());
  for (const auto& r : records) raw.push_back(r.danger);

  std::vector<double> norm;
  if (mode == Normalization::Cap) {
    norm = normalize_cap(raw, cap);
  } else if (!raw.empty()) {
    norm = normalize_iqr(raw);
  }

  std::vector<RiskFeature> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& d = records[i].division;
    out.push_back({d.key, d.point, d.active, raw[i], norm[i], gradient(norm[i])});
  }
  return out;
}

std::string format_number(double value) {
  if (!std::isfinite(value)) throw ContractError("cannot emit a non-finite number");
  return fmt::format("{:.9g}", value);
}

void emit_geojson(std::span<const RiskFeature> features, std::ostream& sink) {
  sink << "{\"type\":\"FeatureCollection\",\"features\":[";
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    sink << (i == 0 ? "\n" : ",\n")
         << "{\"type\":\"Feature\",\"geometry\":{\"type\":\"Point\",\"coordinates\":["
         << format_number(f.point.lon) << ',' << format_number(f.point.lat)
         << "]},\"properties\":{\"division\":" << json_string(f.key.division)
         << ",\"parent\":" << json_string(f.key.parent) << ",\"active\":" << f.active
         << ",\"danger_raw\":" << format_number(f.danger_raw)
         << ",\"danger_norm\":" << format_number(f.danger_norm) << ",\"color\":\""
         << to_hex(f.color) << "\"}}";
  }
  sink << (features.empty() ? "" : "\n") << "]}\n";
  check_sink(sink, "GeoJSON");
}

void emit_html(std::span<const RiskFeature> features, std::ostream& sink) {
  constexpr double width = 960.0;
  constexpr double height = 540.0;
  constexpr double margin = 20.0;

  double min_lon = -180, max_lon = 180, min_lat = -90, max_lat = 90;
  if (!features.empty()) {
    min_lon = max_lon = features[0].point.lon;
    min_lat = max_lat = features[0].point.lat;
    for (const auto& f : features) {
      min_lon = std::min(min_lon, f.point.lon);
      max_lon = std::max(max_lon, f.point.lon);
      min_lat = std::min(min_lat, f.point.lat);
      max_lat = std::max(max_lat, f.point.lat);
    }
  }
  // One scale for both axes keeps the projection equirectangular.
  const double span = std::max({max_lon - min_lon, max_lat - min_lat, 1e-6});
  const double scale = std::min(width, height) - 2 * margin;
  auto x_of = [&](double lon) { return margin + (lon - min_lon) / span * scale; };
  auto y_of = [&](double lat) { return margin + (max_lat - lat) / span * scale; };

  sink << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
          "<title>Hotspot risk map</title>\n<style>\n"
          "body{font-family:sans-serif;margin:16px;background:#fafafa}\n"
          "svg{background:#fff;border:1px solid #ccc}\n"
          ".legend span{display:inline-block;width:14px;height:14px;margin:0 4px 0 12px;"
          "vertical-align:middle}\n"
          "</style>\n</head>\n<body>\n<h1>Hotspot risk map</h1>\n"
          "<div class=\"legend\">"
          "<span style=\"background:#00FF00\"></span>low"
          "<span style=\"background:#FFA500\"></span>elevated"
          "<span style=\"background:#FF0000\"></span>hotspot"
          "</div>\n";
  sink << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  for (const auto& f : features) {
    sink << "<circle cx=\"" << fmt::format("{:.2f}", x_of(f.point.lon)) << "\" cy=\""
         << fmt::format("{:.2f}", y_of(f.point.lat)) << "\" r=\"5\" fill=\"" << to_hex(f.color)
         << "\" stroke=\"#333\" stroke-width=\"0.5\"><title>"
         << html_escape(f.key.division) << ", " << html_escape(f.key.parent)
         << ": active " << f.active << ", danger " << format_number(f.danger_raw)
         << "</title></circle>\n";
  }
  sink << "</svg>\n</body>\n</html>\n";
  check_sink(sink, "HTML");
}

}  // namespace hotspot
