#pragma once

// Scene file format (schema_version "1"): UTF-8 JSON, see docs/scene-format.md.
//
// parse_scene applies defaults and keeps unrecognised members in the scene's
// extension bag; serialize_scene writes the canonical form (sorted keys,
// two-space indent, LF line ends, trailing newline) so that files compare
// byte-for-byte.

#include <charconv>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geomedia/error.hpp"
#include "geomedia/scene.hpp"

namespace geomedia {

namespace detail {

using nlohmann::json;

inline std::string type_name(const json& j) { return j.type_name(); }

inline Error field_error(const std::string& path, const std::string& message) {
  return Error(ErrorCode::field_error, (path.empty() ? std::string("/") : path) + ": " + message)
      .with_field_path(path.empty() ? "/" : path);
}

/// Parses a whole string as a finite double.
inline std::optional<double> parse_number_text(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(value)) return std::nullopt;
  return value;
}

/// Reads one JSON object, tracking which members were consumed so the rest
/// can be stashed in the extension bag.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw field_error(path_, "expected object, found " + type_name(j_));
  }

  const std::string& path() const { return path_; }
  std::string child(std::string_view key) const { return path_ + "/" + std::string(key); }

  const json* find(std::string_view key) {
    consumed_.insert(std::string(key));
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(std::string_view key) {
    const json* v = find(key);
    if (v == nullptr) throw field_error(child(key), "required field is missing");
    return *v;
  }

  std::string string(std::string_view key) { return as_string(require(key), child(key)); }

  std::string string_or(std::string_view key, std::string fallback) {
    const json* v = find(key);
    return v ? as_string(*v, child(key)) : fallback;
  }

  std::optional<std::string> optional_string(std::string_view key) {
    const json* v = find(key);
    if (v == nullptr || v->is_null()) return std::nullopt;
    return as_string(*v, child(key));
  }

  double number(std::string_view key, bool allow_string = false) {
    return as_number(require(key), child(key), allow_string);
  }

  double number_or(std::string_view key, double fallback) {
    const json* v = find(key);
    return v ? as_number(*v, child(key), false) : fallback;
  }

  bool boolean_or(std::string_view key, bool fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw field_error(child(key), "expected boolean, found " + type_name(*v));
    return v->get<bool>();
  }

  std::size_t index_or(std::string_view key, std::size_t fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_unsigned()) {
      throw field_error(child(key), "expected non-negative integer, found " + type_name(*v));
    }
    return v->get<std::size_t>();
  }

  const json* array(std::string_view key) {
    const json* v = find(key);
    if (v != nullptr && !v->is_array()) {
      throw field_error(child(key), "expected array, found " + type_name(*v));
    }
    return v;
  }

  std::vector<std::string> string_array(std::string_view key) {
    std::vector<std::string> out;
    if (const json* a = array(key)) {
      for (std::size_t i = 0; i < a->size(); ++i) {
        out.push_back(as_string((*a)[i], child(key) + "/" + std::to_string(i)));
      }
    }
    return out;
  }

  /// Moves unconsumed members into the extension bag.
  void finish(ExtensionBag& bag) const {
    json extra = json::object();
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!consumed_.contains(it.key())) extra[it.key()] = it.value();
    }
    if (!extra.empty()) bag[path_] = std::move(extra);
  }

  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw field_error(path, "expected string, found " + type_name(v));
    return v.get<std::string>();
  }

  static double as_number(const json& v, const std::string& path, bool allow_string) {
    if (v.is_number()) {
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw field_error(path, "number is not finite");
      return d;
    }
    if (allow_string && v.is_string()) {
      if (const auto d = parse_number_text(v.get_ref<const std::string&>())) return *d;
      throw field_error(path, "string is not a finite number");
    }
    throw field_error(path, "expected number, found " + type_name(v));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> consumed_;
};

inline Vec3 read_vec3(const json& j, const std::string& path, ExtensionBag& bag) {
  ObjectReader r(j, path);
  Vec3 v{r.number("x", true), r.number("y", true), r.number("z", true)};
  r.finish(bag);
  return v;
}

inline BoardSize read_size(const json& j, const std::string& path, ExtensionBag& bag) {
  ObjectReader r(j, path);
  BoardSize s{r.number("width_m"), r.number("height_m")};
  r.finish(bag);
  return s;
}

inline std::optional<Date> read_date(ObjectReader& r, std::string_view key) {
  const auto text = r.optional_string(key);
  if (!text) return std::nullopt;
  const auto date = parse_date(*text);
  if (!date) throw field_error(r.child(key), "expected calendar date YYYY-MM-DD");
  return date;
}

template <class T, class Fn>
std::vector<T> read_list(ObjectReader& parent, std::string_view key, Fn&& read_one) {
  std::vector<T> out;
  if (const json* a = parent.array(key)) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      out.push_back(read_one((*a)[i], parent.child(key) + "/" + std::to_string(i)));
    }
  }
  return out;
}

inline Scene scene_from_json(const json& root) {
  Scene scene;
  ExtensionBag& bag = scene.extensions;
  ObjectReader r(root, "");

  scene.schema_version = r.string_or("schema_version", std::string(kSchemaVersion));
  if (scene.schema_version != kSchemaVersion) {
    throw field_error("/schema_version", "unsupported schema version '" + scene.schema_version + "'");
  }
  scene.scene_id = r.string("id");
  scene.title = r.string("title");
  scene.crs_note = r.string_or("crs_note", "");
  if (const json* o = r.find("origin"); o && !o->is_null()) {
    ObjectReader orr(*o, "/origin");
    scene.origin = GeodeticCoord{orr.number("longitude_deg"), orr.number("latitude_deg"),
                                 orr.number_or("altitude_m", 0.0)};
    orr.finish(bag);
  }

  scene.documents = read_list<MultimediaDocument>(r, "documents", [&](const json& j, const std::string& p) {
    ObjectReader d(j, p);
    MultimediaDocument doc;
    doc.id = d.string("id");
    const std::string kind = d.string("kind");
    const auto k = media_kind_from_string(kind);
    if (!k) throw field_error(d.child("kind"), "unknown media kind '" + kind + "'");
    doc.kind = *k;
    doc.source = d.string("source");
    doc.title = d.string_or("title", "");
    doc.description = d.string_or("description", "");
    doc.provenance_source = d.string_or("provenance_source", "");
    doc.publication_date = read_date(d, "publication_date");
    doc.reference_date = read_date(d, "reference_date");
    for (auto& t : d.string_array("tags")) doc.tags.insert(std::move(t));
    d.finish(bag);
    return doc;
  });

  scene.pins = read_list<GeoPin>(r, "pins", [&](const json& j, const std::string& p) {
    ObjectReader e(j, p);
    GeoPin pin;
    pin.entity_id = e.string("id");
    pin.document_id = e.string("document_id");
    pin.anchor = read_vec3(e.require("anchor"), e.child("anchor"), bag);
    ObjectReader t(e.require("thumbnail"), e.child("thumbnail"));
    pin.thumbnail.document_id = pin.document_id;
    pin.thumbnail.image_source = t.string("image");
    pin.thumbnail.locked_image_source = t.optional_string("locked_image");
    t.finish(bag);
    pin.activated = e.boolean_or("activated", true);
    const std::string anchor = e.string_or("panel_anchor", "left");
    const auto a = screen_anchor_from_string(anchor);
    if (!a) throw field_error(e.child("panel_anchor"), "unknown panel anchor '" + anchor + "'");
    pin.panel_anchor = *a;
    e.finish(bag);
    return pin;
  });

  scene.web_boards = read_list<GeoWebBoard>(r, "web_boards", [&](const json& j, const std::string& p) {
    ObjectReader e(j, p);
    GeoWebBoard b;
    b.entity_id = e.string("id");
    b.document_id = e.string("document_id");
    b.anchor = read_vec3(e.require("anchor"), e.child("anchor"), bag);
    b.size = read_size(e.require("size"), e.child("size"), bag);
    e.finish(bag);
    return b;
  });

  scene.extended_documents =
      read_list<ExtendedDocumentEntity>(r, "extended_documents", [&](const json& j, const std::string& p) {
        ObjectReader e(j, p);
        ExtendedDocumentEntity x;
        x.entity_id = e.string("id");
        x.document_id = e.string("document_id");
        ObjectReader cam(e.require("camera"), e.child("camera"));
        x.camera.position = read_vec3(cam.require("position"), cam.child("position"), bag);
        ObjectReader q(cam.require("orientation"), cam.child("orientation"));
        try {
          x.camera.orientation = Quaternion(q.number("w"), q.number("x"), q.number("y"), q.number("z"));
        } catch (const Error& err) {
          if (err.code() == ErrorCode::field_error) throw;
          throw field_error(q.path(), err.what());
        }
        q.finish(bag);
        cam.finish(bag);
        x.overlay_opacity = e.number_or("overlay_opacity", 1.0);
        e.finish(bag);
        return x;
      });

  scene.slideshows = read_list<Slideshow>(r, "slideshows", [&](const json& j, const std::string& p) {
    ObjectReader e(j, p);
    Slideshow s;
    s.entity_id = e.string("id");
    s.center = read_vec3(e.require("center"), e.child("center"), bag);
    s.size = read_size(e.require("size"), e.child("size"), bag);
    const std::string o = e.string_or("orientation", "horizontal");
    if (o == "horizontal") s.orientation = PlaneOrientation::horizontal;
    else if (o == "vertical") s.orientation = PlaneOrientation::vertical;
    else throw field_error(e.child("orientation"), "expected 'horizontal' or 'vertical'");
    s.heading_deg = e.number_or("heading_deg", 0.0);
    s.media = e.string_array("media");
    s.current_index = e.index_or("current_index", 0);
    e.finish(bag);
    return s;
  });

  if (const json* g = r.find("guidance")) {
    ObjectReader gr(*g, "/guidance");
    const std::string mode = gr.string_or("mode", "free");
    const auto m = guidance_mode_from_string(mode);
    if (!m) throw field_error(gr.child("mode"), "unknown guidance mode '" + mode + "'");
    scene.guidance.mode = *m;
    if (const json* pre = gr.find("prerequisites")) {
      if (!pre->is_object()) throw field_error(gr.child("prerequisites"), "expected object, found " + type_name(*pre));
      for (auto it = pre->begin(); it != pre->end(); ++it) {
        const std::string path = gr.child("prerequisites") + "/" + it.key();
        if (!it.value().is_array()) throw field_error(path, "expected array, found " + type_name(it.value()));
        DocumentIdSet reqs;
        for (std::size_t i = 0; i < it.value().size(); ++i) {
          reqs.insert(ObjectReader::as_string(it.value()[i], path + "/" + std::to_string(i)));
        }
        scene.guidance.graph.prerequisites.emplace(it.key(), std::move(reqs));
      }
    }
    scene.guidance.graph.order = gr.string_array("order");
    gr.finish(bag);
  }

  scene.tileset_refs = r.string_array("tilesets");

  scene.layers = read_list<GeoserviceLayer>(r, "layers", [&](const json& j, const std::string& p) {
    ObjectReader e(j, p);
    GeoserviceLayer l;
    const std::string kind = e.string("kind");
    if (kind == "wms") l.kind = GeoserviceKind::wms;
    else if (kind == "wfs") l.kind = GeoserviceKind::wfs;
    else throw field_error(e.child("kind"), "expected 'wms' or 'wfs'");
    l.base_url = e.string("base_url");
    l.layer_name = e.string("layer_name");
    l.default_style = e.optional_string("default_style");
    e.finish(bag);
    return l;
  });

  r.finish(bag);
  return scene;
}

inline json to_json(const Vec3& v) { return {{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

inline json to_json(const BoardSize& s) { return {{"width_m", s.width_m}, {"height_m", s.height_m}}; }

inline json scene_to_json(const Scene& s) {
  json root = json::object();
  root["schema_version"] = s.schema_version;
  root["id"] = s.scene_id;
  root["title"] = s.title;
  root["crs_note"] = s.crs_note;
  if (s.origin) {
    root["origin"] = {{"longitude_deg", s.origin->longitude_deg},
                      {"latitude_deg", s.origin->latitude_deg},
                      {"altitude_m", s.origin->altitude_m}};
  }

  json docs = json::array();
  for (const auto& d : s.documents) {
    json j = {{"id", d.id},
              {"kind", to_string(d.kind)},
              {"source", d.source},
              {"title", d.title},
              {"description", d.description},
              {"provenance_source", d.provenance_source},
              {"tags", d.tags}};
    if (d.publication_date) j["publication_date"] = format_date(*d.publication_date);
    if (d.reference_date) j["reference_date"] = format_date(*d.reference_date);
    docs.push_back(std::move(j));
  }
  root["documents"] = std::move(docs);

  json pins = json::array();
  for (const auto& p : s.pins) {
    json thumb = {{"image", p.thumbnail.image_source}};
    if (p.thumbnail.locked_image_source) thumb["locked_image"] = *p.thumbnail.locked_image_source;
    pins.push_back({{"id", p.entity_id},
                    {"document_id", p.document_id},
                    {"anchor", to_json(p.anchor)},
                    {"thumbnail", std::move(thumb)},
                    {"activated", p.activated},
                    {"panel_anchor", to_string(p.panel_anchor)}});
  }
  root["pins"] = std::move(pins);

  json boards = json::array();
  for (const auto& b : s.web_boards) {
    boards.push_back({{"id", b.entity_id},
                      {"document_id", b.document_id},
                      {"anchor", to_json(b.anchor)},
                      {"size", to_json(b.size)}});
  }
  root["web_boards"] = std::move(boards);

  json extended = json::array();
  for (const auto& e : s.extended_documents) {
    const auto& q = e.camera.orientation;
    extended.push_back(
        {{"id", e.entity_id},
         {"document_id", e.document_id},
         {"camera",
          {{"position", to_json(e.camera.position)},
           {"orientation", {{"w", q.w()}, {"x", q.x()}, {"y", q.y()}, {"z", q.z()}}}}},
         {"overlay_opacity", e.overlay_opacity}});
  }
  root["extended_documents"] = std::move(extended);

  json slideshows = json::array();
  for (const auto& sl : s.slideshows) {
    slideshows.push_back({{"id", sl.entity_id},
                          {"center", to_json(sl.center)},
                          {"size", to_json(sl.size)},
                          {"orientation", to_string(sl.orientation)},
                          {"heading_deg", sl.heading_deg},
                          {"media", sl.media},
                          {"current_index", sl.current_index}});
  }
  root["slideshows"] = std::move(slideshows);

  json prerequisites = json::object();
  for (const auto& [doc, reqs] : s.guidance.graph.prerequisites) prerequisites[doc] = reqs;
  root["guidance"] = {{"mode", to_string(s.guidance.mode)},
                      {"prerequisites", std::move(prerequisites)},
                      {"order", s.guidance.graph.order}};

  root["tilesets"] = s.tileset_refs;

  json layers = json::array();
  for (const auto& l : s.layers) {
    json j = {{"kind", to_string(l.kind)}, {"base_url", l.base_url}, {"layer_name", l.layer_name}};
    if (l.default_style) j["default_style"] = *l.default_style;
    layers.push_back(std::move(j));
  }
  root["layers"] = std::move(layers);

  for (const auto& [path, extra] : s.extensions) {
    const json::json_pointer ptr(path);
    if (!root.contains(ptr)) continue;
    json& target = root[ptr];
    if (!target.is_object()) continue;
    for (auto it = extra.begin(); it != extra.end(); ++it) {
      if (!target.contains(it.key())) target[it.key()] = it.value();
    }
  }
  return root;
}

}  // namespace detail

/// Parses a scene file. Syntax errors carry the byte offset; schema errors
/// carry the JSON pointer of the offending field.
inline Scene parse_scene(std::string_view bytes) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::syntax_error, std::string("malformed JSON: ") + e.what())
        .with_byte_offset(e.byte);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::syntax_error, std::string("malformed JSON: ") + e.what());
  }
  try {
    return detail::scene_from_json(root);
  } catch (const nlohmann::json::exception& e) {
    throw detail::field_error("/", e.what());
  }
}

inline std::string serialize_scene(const Scene& scene) {
  return detail::scene_to_json(scene).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

}  // namespace geomedia
