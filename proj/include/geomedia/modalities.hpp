#pragma once

// The four ways a document is placed in the scene: geo-pinned thumbnails,
// camera-facing web boards, extended documents bound to a camera pose, and
// slideshows projected on a fixed plane.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geomedia/document.hpp"
#include "geomedia/error.hpp"
#include "geomedia/geo.hpp"

namespace geomedia {

/// Where an opened pin's 2D panel docks on screen.
enum class ScreenAnchor { left, right, bottom, center };

constexpr std::string_view to_string(ScreenAnchor a) {
  switch (a) {
    case ScreenAnchor::left: return "left";
    case ScreenAnchor::right: return "right";
    case ScreenAnchor::bottom: return "bottom";
    case ScreenAnchor::center: return "center";
  }
  return "left";
}

inline std::optional<ScreenAnchor> screen_anchor_from_string(std::string_view s) {
  for (ScreenAnchor a : {ScreenAnchor::left, ScreenAnchor::right, ScreenAnchor::bottom,
                         ScreenAnchor::center}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

struct BoardSize {
  double width_m = 1.0;
  double height_m = 1.0;

  friend bool operator==(const BoardSize&, const BoardSize&) = default;
};

inline bool is_positive(const BoardSize& s) {
  return std::isfinite(s.width_m) && std::isfinite(s.height_m) && s.width_m > 0.0 &&
         s.height_m > 0.0;
}

/// Pin with a thumbnail. Rendered at constant screen size; the linked
/// document opens as a 2D panel and the camera stays put.
struct GeoPin {
  std::string entity_id;
  std::string document_id;
  Vec3 anchor;
  Thumbnail thumbnail;
  bool activated = true;
  ScreenAnchor panel_anchor = ScreenAnchor::left;

  friend bool operator==(const GeoPin&, const GeoPin&) = default;
};

/// Document rendered in-world, camera-facing, sized in world meters.
struct GeoWebBoard {
  std::string entity_id;
  std::string document_id;
  Vec3 anchor;
  BoardSize size;

  friend bool operator==(const GeoWebBoard&, const GeoWebBoard&) = default;
};

struct ExtendedDocumentEntity {
  std::string entity_id;
  std::string document_id;
  CameraPose camera;
  double overlay_opacity = 1.0;

  friend bool operator==(const ExtendedDocumentEntity&, const ExtendedDocumentEntity&) = default;
};

enum class PlaneOrientation { horizontal, vertical };

constexpr std::string_view to_string(PlaneOrientation o) {
  return o == PlaneOrientation::horizontal ? "horizontal" : "vertical";
}

struct Slideshow {
  std::string entity_id;
  Vec3 center;
  BoardSize size;
  PlaneOrientation orientation = PlaneOrientation::horizontal;
  double heading_deg = 0.0;  // counterclockwise about up, seen from above
  std::vector<std::string> media;
  std::size_t current_index = 0;

  friend bool operator==(const Slideshow&, const Slideshow&) = default;
};

struct PanelOpenResult {
  std::string document_id;
  ScreenAnchor panel_anchor;

  friend bool operator==(const PanelOpenResult&, const PanelOpenResult&) = default;
};

struct ViewPlan {
  TravelPlan travel;
  std::string overlay_document_id;
  double overlay_opacity = 1.0;
};

namespace detail {

inline const MultimediaDocument* find_document(std::span<const MultimediaDocument> docs,
                                               std::string_view id) {
  const auto it = std::find_if(docs.begin(), docs.end(),
                               [&](const MultimediaDocument& d) { return d.id == id; });
  return it == docs.end() ? nullptr : &*it;
}

}  // namespace detail

/// Sets each pin's activation to membership in `available`. Locked pins stay
/// in the list so the viewer can still draw them with a lock glyph.
inline std::vector<GeoPin> apply_availability(std::vector<GeoPin> pins,
                                              const std::set<std::string>& available) {
  for (GeoPin& pin : pins) pin.activated = available.contains(pin.document_id);
  return pins;
}

inline PanelOpenResult open_pin(const GeoPin& pin, std::span<const MultimediaDocument> docs) {
  if (detail::find_document(docs, pin.document_id) == nullptr) {
    throw Error(ErrorCode::dangling_reference,
                "pin '" + pin.entity_id + "' references unknown document '" + pin.document_id + "'")
        .with_document(pin.document_id);
  }
  if (!pin.activated) {
    throw Error(ErrorCode::locked_content, "document '" + pin.document_id + "' is locked")
        .with_document(pin.document_id);
  }
  return {pin.document_id, pin.panel_anchor};
}

struct Quad {
  std::array<Vec3, 4> corners;  // (-w,-h), (+w,-h), (+w,+h), (-w,+h) in plane axes
  Vec3 normal;
};

/// Plane geometry of a slideshow in scene coordinates (z up).
///
/// Heading 0: a horizontal plane spans width along east and height along
/// north; a vertical plane spans width along east and height along up, with
/// its normal pointing north. Positive headings rotate counterclockwise seen
/// from above.
inline Quad slideshow_quad(const Slideshow& s) {
  if (!is_positive(s.size)) {
    throw Error(ErrorCode::invalid_size, "slideshow size must be positive");
  }
  if (!is_finite(s.center) || !std::isfinite(s.heading_deg)) {
    throw Error(ErrorCode::invalid_coordinate, "slideshow center and heading must be finite");
  }
  const double h = s.heading_deg * detail::kDegToRad;
  const Vec3 width_axis{std::cos(h), std::sin(h), 0.0};
  const Vec3 facing{-std::sin(h), std::cos(h), 0.0};
  const Vec3 height_axis = s.orientation == PlaneOrientation::horizontal ? facing : kWorldUp;
  const Vec3 normal = s.orientation == PlaneOrientation::horizontal ? kWorldUp : facing;
  const Vec3 hw = width_axis * (s.size.width_m / 2.0);
  const Vec3 hh = height_axis * (s.size.height_m / 2.0);
  return {{s.center - hw - hh, s.center + hw - hh, s.center + hw + hh, s.center - hw + hh}, normal};
}

/// Advances the current slide by `delta`, wrapping in both directions.
inline Slideshow slideshow_step(Slideshow s, std::int64_t delta) {
  if (s.media.empty()) {
    throw Error(ErrorCode::empty_slideshow, "slideshow '" + s.entity_id + "' has no media");
  }
  const auto n = static_cast<std::int64_t>(s.media.size());
  const auto current = static_cast<std::int64_t>(s.current_index % s.media.size());
  s.current_index = static_cast<std::size_t>((((current + delta) % n) + n) % n);
  return s;
}

/// Media kinds an extended document can superimpose on the 3D view.
inline bool supports_overlay(MediaKind kind) {
  return kind == MediaKind::image || kind == MediaKind::animated_image || kind == MediaKind::video;
}

inline ViewPlan build_view_plan(const ExtendedDocumentEntity& e, const CameraPose& current,
                                std::span<const MultimediaDocument> docs,
                                const TravelSettings& settings = {}) {
  const MultimediaDocument* doc = detail::find_document(docs, e.document_id);
  if (doc == nullptr) {
    throw Error(ErrorCode::dangling_reference,
                "extended document '" + e.entity_id + "' references unknown document '" +
                    e.document_id + "'")
        .with_document(e.document_id);
  }
  if (!supports_overlay(doc->kind)) {
    throw Error(ErrorCode::unsupported_media, "documents of kind '" + std::string(to_string(doc->kind)) +
                                                  "' cannot be overlaid")
        .with_document(e.document_id);
  }
  return {travel_plan(current, e.camera, settings), e.document_id, e.overlay_opacity};
}

inline ExtendedDocumentEntity set_overlay_opacity(ExtendedDocumentEntity e, double alpha) {
  if (!std::isfinite(alpha)) {
    throw Error(ErrorCode::invalid_parameter, "opacity must be finite");
  }
  e.overlay_opacity = std::clamp(alpha, 0.0, 1.0);
  return e;
}

}  // namespace geomedia
