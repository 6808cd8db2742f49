#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "geomedia/error.hpp"
#include "geomedia/scene.hpp"

namespace geomedia {

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

/// RFC 3986 percent-encoding; only unreserved characters pass through.
inline std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
        c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

/// Shortest plain decimal (no exponent) that reads back as the same double.
inline std::string format_number(double value) {
  std::array<char, 400> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  return std::string(buf.data(), ptr);
}

/// WMS 1.3.0 GetMap request for one layer as PNG.
///
/// The bounding box is written in the order given; callers are responsible
/// for the axis order the CRS mandates (EPSG:4326 is lat/lon in 1.3.0).
inline std::string build_wms_map_url(const GeoserviceLayer& layer, const BoundingBox& bbox, int width_px,
                                     int height_px, std::string_view crs_code) {
  if (layer.kind != GeoserviceKind::wms) {
    throw Error(ErrorCode::invalid_parameter, "GetMap URLs are only built for WMS layers");
  }
  if (layer.base_url.empty() || layer.layer_name.empty()) {
    throw Error(ErrorCode::invalid_parameter, "layer needs a base URL and a layer name");
  }
  for (double v : {bbox.min_x, bbox.min_y, bbox.max_x, bbox.max_y}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_bbox, "bounding box must be finite");
  }
  if (!(bbox.min_x < bbox.max_x) || !(bbox.min_y < bbox.max_y)) {
    throw Error(ErrorCode::invalid_bbox, "bounding box minimum must be below its maximum");
  }
  if (width_px <= 0 || height_px <= 0) {
    throw Error(ErrorCode::invalid_parameter, "image size must be positive");
  }
  if (crs_code.empty()) throw Error(ErrorCode::invalid_parameter, "CRS code is empty");

  const std::string bbox_text = percent_encode(format_number(bbox.min_x)) + "," +
                                percent_encode(format_number(bbox.min_y)) + "," +
                                percent_encode(format_number(bbox.max_x)) + "," +
                                percent_encode(format_number(bbox.max_y));
  const std::pair<std::string_view, std::string> params[] = {
      {"SERVICE", "WMS"},
      {"VERSION", "1.3.0"},
      {"REQUEST", "GetMap"},
      {"LAYERS", percent_encode(layer.layer_name)},
      {"STYLES", percent_encode(layer.default_style.value_or(""))},
      {"CRS", percent_encode(crs_code)},
      {"BBOX", bbox_text},
      {"WIDTH", std::to_string(width_px)},
      {"HEIGHT", std::to_string(height_px)},
      {"FORMAT", percent_encode("image/png")},
  };

  std::string url = layer.base_url;
  char sep = url.find('?') == std::string::npos ? '?' : '&';
  if (url.back() == '?' || url.back() == '&') sep = '\0';
  for (const auto& [key, value] : params) {
    if (sep != '\0') url.push_back(sep);
    url.append(key).append("=").append(value);
    sep = '&';
  }
  return url;
}

}  // namespace geomedia
