#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geomedia/document.hpp"
#include "geomedia/geo.hpp"
#include "geomedia/guidance.hpp"
#include "geomedia/modalities.hpp"

namespace geomedia {

inline constexpr std::string_view kSchemaVersion = "1";

enum class GeoserviceKind { wms, wfs };

constexpr std::string_view to_string(GeoserviceKind k) { return k == GeoserviceKind::wms ? "wms" : "wfs"; }

struct GeoserviceLayer {
  GeoserviceKind kind = GeoserviceKind::wms;
  std::string base_url;
  std::string layer_name;
  std::optional<std::string> default_style;

  friend bool operator==(const GeoserviceLayer&, const GeoserviceLayer&) = default;
};

struct SceneGuidance {
  GuidanceMode mode = GuidanceMode::free;
  GuidanceGraph graph;

  friend bool operator==(const SceneGuidance&, const SceneGuidance&) = default;
};

/// Unknown JSON members, keyed by the JSON pointer of the object that held
/// them ("" for the root, "/pins/3", ...). Written back verbatim.
using ExtensionBag = std::map<std::string, nlohmann::json>;

struct Scene {
  std::string schema_version{kSchemaVersion};
  std::string scene_id;
  std::string title;
  std::string crs_note;
  std::optional<GeodeticCoord> origin;
  std::vector<MultimediaDocument> documents;
  std::vector<GeoPin> pins;
  std::vector<GeoWebBoard> web_boards;
  std::vector<ExtendedDocumentEntity> extended_documents;
  std::vector<Slideshow> slideshows;
  SceneGuidance guidance;
  std::vector<std::string> tileset_refs;
  std::vector<GeoserviceLayer> layers;
  ExtensionBag extensions;

  friend bool operator==(const Scene&, const Scene&) = default;

  const MultimediaDocument* find_document(std::string_view id) const {
    return detail::find_document(documents, id);
  }
};

inline DocumentIdSet document_ids(const Scene& scene) {
  DocumentIdSet ids;
  for (const auto& d : scene.documents) ids.insert(d.id);
  return ids;
}

// Scene-level conveniences over the guidance state machines.

inline GuidanceReport validate_guidance_graph(const Scene& scene) {
  return validate_guidance_graph(document_ids(scene), scene.guidance.graph);
}

inline GuidanceState new_session(const Scene& scene, GuidanceMode mode) {
  return new_session(document_ids(scene), scene.guidance.graph, mode, scene.scene_id);
}

inline DocumentIdSet available_documents(const GuidanceState& state, const Scene& scene) {
  return available_documents(state, document_ids(scene), scene.guidance.graph);
}

inline GuidanceState record_view(GuidanceState state, const std::string& doc_id, const Scene& scene) {
  return record_view(std::move(state), doc_id, document_ids(scene), scene.guidance.graph);
}

inline double progress(const GuidanceState& state, const Scene& scene) {
  return progress(state, document_ids(scene), scene.guidance.graph);
}

struct SceneFinding {
  std::string path;
  std::string message;
};

using SceneReport = std::vector<SceneFinding>;

/// Everything that would stop a scene from loading. Empty means loadable.
inline SceneReport validate_scene(const Scene& scene) {
  SceneReport report;
  auto add = [&](std::string path, std::string message) {
    report.push_back({std::move(path), std::move(message)});
  };
  auto finite = [](double v) { return std::isfinite(v); };

  if (scene.schema_version != kSchemaVersion) {
    add("/schema_version", "unsupported schema version '" + scene.schema_version + "'");
  }
  if (scene.scene_id.empty()) add("/id", "scene id is empty");
  if (scene.origin && !is_valid(*scene.origin)) add("/origin", "origin is not a valid geodetic coordinate");

  std::set<std::string> doc_ids;
  for (std::size_t i = 0; i < scene.documents.size(); ++i) {
    const auto& d = scene.documents[i];
    const std::string path = "/documents/" + std::to_string(i);
    if (d.id.empty()) add(path + "/id", "document id is empty");
    else if (!doc_ids.insert(d.id).second) add(path + "/id", "duplicate document id '" + d.id + "'");
    if (d.source.empty()) add(path + "/source", "document source is empty");
  }

  std::set<std::string> entity_ids;
  auto check_entity_id = [&](const std::string& id, const std::string& path) {
    if (id.empty()) add(path + "/id", "entity id is empty");
    else if (!entity_ids.insert(id).second) add(path + "/id", "duplicate entity id '" + id + "'");
  };
  auto check_doc_ref = [&](const std::string& id, const std::string& path) {
    if (!doc_ids.contains(id)) add(path, "unknown document '" + id + "'");
  };

  for (std::size_t i = 0; i < scene.pins.size(); ++i) {
    const auto& p = scene.pins[i];
    const std::string path = "/pins/" + std::to_string(i);
    check_entity_id(p.entity_id, path);
    check_doc_ref(p.document_id, path + "/document_id");
    if (!is_finite(p.anchor)) add(path + "/anchor", "anchor is not finite");
    if (p.thumbnail.image_source.empty()) add(path + "/thumbnail/image", "thumbnail image is empty");
    if (p.thumbnail.document_id != p.document_id)
      add(path + "/thumbnail", "thumbnail belongs to a different document");
  }
  for (std::size_t i = 0; i < scene.web_boards.size(); ++i) {
    const auto& b = scene.web_boards[i];
    const std::string path = "/web_boards/" + std::to_string(i);
    check_entity_id(b.entity_id, path);
    check_doc_ref(b.document_id, path + "/document_id");
    if (!is_finite(b.anchor)) add(path + "/anchor", "anchor is not finite");
    if (!is_positive(b.size)) add(path + "/size", "board size must be positive");
  }
  for (std::size_t i = 0; i < scene.extended_documents.size(); ++i) {
    const auto& e = scene.extended_documents[i];
    const std::string path = "/extended_documents/" + std::to_string(i);
    check_entity_id(e.entity_id, path);
    check_doc_ref(e.document_id, path + "/document_id");
    if (const auto* doc = scene.find_document(e.document_id); doc && !supports_overlay(doc->kind)) {
      add(path + "/document_id",
          "documents of kind '" + std::string(to_string(doc->kind)) + "' cannot be overlaid");
    }
    if (!is_finite(e.camera)) add(path + "/camera", "camera pose is not finite");
    if (!(finite(e.overlay_opacity) && e.overlay_opacity >= 0.0 && e.overlay_opacity <= 1.0))
      add(path + "/overlay_opacity", "opacity must lie in [0,1]");
  }
  for (std::size_t i = 0; i < scene.slideshows.size(); ++i) {
    const auto& s = scene.slideshows[i];
    const std::string path = "/slideshows/" + std::to_string(i);
    check_entity_id(s.entity_id, path);
    if (!is_finite(s.center)) add(path + "/center", "center is not finite");
    if (!is_positive(s.size)) add(path + "/size", "slideshow size must be positive");
    if (!finite(s.heading_deg)) add(path + "/heading_deg", "heading is not finite");
    if (s.media.empty()) add(path + "/media", "slideshow has no media");
    else if (s.current_index >= s.media.size()) add(path + "/current_index", "current index out of range");
    for (std::size_t k = 0; k < s.media.size(); ++k) {
      check_doc_ref(s.media[k], path + "/media/" + std::to_string(k));
    }
  }
  for (std::size_t i = 0; i < scene.layers.size(); ++i) {
    const auto& l = scene.layers[i];
    const std::string path = "/layers/" + std::to_string(i);
    if (l.base_url.empty()) add(path + "/base_url", "layer base URL is empty");
    if (l.layer_name.empty()) add(path + "/layer_name", "layer name is empty");
  }

  for (const auto& f : validate_guidance_graph(doc_ids, scene.guidance.graph)) {
    add("/guidance", std::string(to_string(f.issue)) + ": " + f.message);
  }
  if (scene.guidance.mode == GuidanceMode::sequential && scene.guidance.graph.order.empty() &&
      !doc_ids.empty()) {
    add("/guidance/order", "sequential guidance requires a document order");
  }
  return report;
}

}  // namespace geomedia
