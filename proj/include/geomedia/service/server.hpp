#pragma once

// HTTP/1.1 JSON API over scenes, document content and guidance sessions.
//
//   GET  /scenes                                  scene ids
//   GET  /scenes/{id}                             canonical scene JSON (ETag)
//   GET  /scenes/{id}/layers/{name}/map-url       WMS GetMap URL for a layer
//   GET  /documents/{id}/content                  stored bytes, 307 for web pages
//   POST /scenes/{id}/sessions      {mode}        new guidance session
//   GET  /sessions/{id}                           session state
//   POST /sessions/{id}/views       {document_id} record a view
//   GET  /sessions/{id}/pins                      pins with current activation
//   POST /sessions/{id}/view-plans  {entity_id, camera}
//                                                 camera travel + overlay for an
//                                                 extended document
//
// Errors are JSON objects {code, message, field_path?}.

#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "geomedia/error.hpp"
#include "geomedia/geoservice.hpp"
#include "geomedia/modalities.hpp"
#include "geomedia/scene.hpp"
#include "geomedia/scene_io.hpp"
#include "geomedia/service/content_store.hpp"
#include "geomedia/service/crypto.hpp"
#include "geomedia/service/session_store.hpp"

namespace geomedia::service {

struct ServiceConfig {
  std::filesystem::path scene_dir;
  std::filesystem::path data_dir;  // empty: nothing persisted
  std::string viewer_origin = "*";
  TravelSettings travel;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found:
    case ErrorCode::dangling_reference: return 404;
    case ErrorCode::locked_content: return 409;
    case ErrorCode::misconfigured_guidance:
    case ErrorCode::unsupported_media: return 422;
    case ErrorCode::io_error: return 500;
    default: return 400;
  }
}

inline nlohmann::json error_body(const Error& e) {
  nlohmann::json body = {{"code", to_string(e.code())}, {"message", e.what()}};
  if (e.field_path()) body["field_path"] = *e.field_path();
  if (e.document_id()) body["document_id"] = *e.document_id();
  return body;
}

inline nlohmann::json vec3_json(const Vec3& v) { return {{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

inline nlohmann::json pose_json(const CameraPose& p) {
  const auto& q = p.orientation;
  return {{"position", vec3_json(p.position)},
          {"orientation", {{"w", q.w()}, {"x", q.x()}, {"y", q.y()}, {"z", q.z()}}}};
}

inline constexpr std::string_view to_string(Easing e) {
  switch (e) {
    case Easing::linear: return "linear";
    case Easing::smoothstep: return "smoothstep";
    case Easing::smootherstep: return "smootherstep";
  }
  return "smoothstep";
}

class SceneService {
 public:
  explicit SceneService(ServiceConfig config)
      : config_(std::move(config)),
        content_(config_.data_dir.empty() ? std::filesystem::path{} : config_.data_dir / "blobs"),
        sessions_(config_.data_dir.empty() ? std::filesystem::path{}
                                           : config_.data_dir / "sessions.journal") {
    if (!config_.scene_dir.empty()) load_scene_dir(config_.scene_dir);
    sessions_.replay([this](const std::string& id) { return find_scene_ptr(id); });
    // Plain SO_REUSEADDR: a second instance on the same port must fail to
    // bind instead of sharing it.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    install_routes();
  }

  SceneService(const SceneService&) = delete;
  SceneService& operator=(const SceneService&) = delete;

  /// Loads every *.json scene in `dir`. Invalid scenes are reported on
  /// stderr and skipped. Returns the number loaded.
  std::size_t load_scene_dir(const std::filesystem::path& dir) {
    std::size_t loaded = 0;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      try {
        add_scene(parse_scene(read_file(file)), file.parent_path());
        ++loaded;
      } catch (const Error& e) {
        std::cerr << "skipping scene " << file << ": " << e.what() << "\n";
      }
    }
    return loaded;
  }

  /// Registers a scene. Local document sources are resolved against
  /// `base_dir` and ingested into the content store.
  void add_scene(Scene scene, const std::filesystem::path& base_dir = {}) {
    if (const auto report = validate_scene(scene); !report.empty()) {
      throw Error(ErrorCode::field_error, "scene '" + scene.scene_id + "' is invalid: " +
                                              report.front().path + ": " + report.front().message)
          .with_field_path(report.front().path);
    }
    auto record = std::make_shared<SceneRecord>();
    record->canonical = serialize_scene(scene);
    record->etag = "\"" + sha256_hex(record->canonical) + "\"";
    for (const auto& doc : scene.documents) {
      DocumentRecord d{scene.scene_id, doc, std::nullopt};
      if (doc.source.starts_with("sha256:")) {
        if (content_.contains(doc.source)) d.content_key = doc.source;
      } else if (!is_remote(doc.source)) {
        const auto path = base_dir / doc.source;
        std::error_code ec;
        if (std::filesystem::is_regular_file(path, ec)) {
          d.content_key = content_.put(read_file(path), media_type_for_path(doc.source));
        }
      }
      std::unique_lock lock(mutex_);
      if (!documents_.contains(doc.id)) documents_.emplace(doc.id, std::move(d));
      else std::cerr << "document id '" << doc.id << "' already served by another scene\n";
    }
    record->scene = std::move(scene);
    std::unique_lock lock(mutex_);
    scenes_[record->scene.scene_id] = std::move(record);
  }

  ContentStore& content() { return content_; }
  SessionStore& sessions() { return sessions_; }
  httplib::Server& http() { return server_; }

  /// Binds the listener; port 0 picks a free port. Returns the bound port or
  /// -1 on failure.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }

  /// Serves until stop(). Blocks.
  bool run() { return server_.listen_after_bind(); }

  void stop() {
    server_.stop();
    sessions_.flush();
  }

  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  struct SceneRecord {
    Scene scene;
    std::string canonical;
    std::string etag;
  };

  struct DocumentRecord {
    std::string scene_id;
    MultimediaDocument document;
    std::optional<std::string> content_key;
  };

  static bool is_remote(std::string_view source) {
    return source.starts_with("http://") || source.starts_with("https://");
  }

  std::shared_ptr<const SceneRecord> find_scene(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = scenes_.find(id);
    return it == scenes_.end() ? nullptr : it->second;
  }

  const Scene* find_scene_ptr(const std::string& id) const {
    const auto rec = find_scene(id);
    return rec ? &rec->scene : nullptr;
  }

  std::shared_ptr<const SceneRecord> require_scene(const std::string& id) const {
    auto rec = find_scene(id);
    if (!rec) throw Error(ErrorCode::not_found, "unknown scene '" + id + "'");
    return rec;
  }

  Session require_session(const std::string& id) const {
    auto s = sessions_.get(id);
    if (!s) throw Error(ErrorCode::not_found, "unknown session '" + id + "'");
    return *s;
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    try {
      auto body = nlohmann::json::parse(req.body.empty() ? std::string("{}") : req.body);
      if (!body.is_object()) throw Error(ErrorCode::field_error, "request body must be a JSON object").with_field_path("/");
      return body;
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::syntax_error, std::string("malformed request body: ") + e.what())
          .with_byte_offset(e.byte);
    }
  }

  static void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  nlohmann::json session_json(const Session& s, const Scene& scene) const {
    const auto available = available_documents(s.state, scene);
    return {{"session_id", s.session_id},
            {"scene_id", s.scene_id},
            {"mode", to_string(s.state.mode)},
            {"viewed", s.state.viewed},
            {"available", available},
            {"progress", progress(s.state, scene)},
            {"created_at", s.created_at},
            {"updated_at", s.updated_at}};
  }

  template <class Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_json(res, error_body(e), http_status(e.code()));
      } catch (const std::exception& e) {
        send_json(res, {{"code", "internal"}, {"message", e.what()}}, 500);
      }
    };
  }

  void install_routes() {
    server_.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", config_.viewer_origin);
      if (config_.viewer_origin != "*") res.set_header("Vary", "Origin");
      res.set_header("Access-Control-Expose-Headers", "ETag, Content-Range, Location");
    });
    // Routing misses and malformed requests get the same JSON error shape.
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const std::string code = res.status == 404 ? "not-found" : res.status >= 500 ? "internal" : "bad-request";
      res.set_content(nlohmann::json{{"code", code}, {"message", httplib::status_message(res.status)}}.dump(),
                      "application/json");
    });
    server_.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, If-None-Match, Range");
      res.set_header("Access-Control-Max-Age", "600");
    });

    server_.Get("/scenes", guarded([this](const httplib::Request&, httplib::Response& res) {
      std::vector<std::string> ids;
      {
        std::shared_lock lock(mutex_);
        for (const auto& [id, _] : scenes_) ids.push_back(id);
      }
      send_json(res, {{"scenes", ids}});
    }));

    server_.Get(R"(/scenes/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto rec = require_scene(req.matches[1]);
      res.set_header("ETag", rec->etag);
      if (req.has_header("If-None-Match") && req.get_header_value("If-None-Match") == rec->etag) {
        res.status = 304;
        return;
      }
      res.set_content(rec->canonical, "application/json");
    }));

    server_.Get(R"(/scenes/([^/]+)/layers/([^/]+)/map-url)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto rec = require_scene(req.matches[1]);
                  const std::string name = req.matches[2];
                  const auto& layers = rec->scene.layers;
                  const auto it = std::find_if(layers.begin(), layers.end(),
                                               [&](const GeoserviceLayer& l) { return l.layer_name == name; });
                  if (it == layers.end()) throw Error(ErrorCode::not_found, "unknown layer '" + name + "'");
                  const auto number = [&](const std::string& key) {
                    const auto v = geomedia::detail::parse_number_text(req.get_param_value(key));
                    if (!v) throw Error(ErrorCode::invalid_parameter, "query parameter '" + key + "' must be a number");
                    return *v;
                  };
                  const std::string bbox_text = req.get_param_value("bbox");
                  std::vector<double> parts;
                  std::size_t start = 0;
                  while (start <= bbox_text.size()) {
                    const auto comma = bbox_text.find(',', start);
                    const auto v = geomedia::detail::parse_number_text(
                        std::string_view(bbox_text).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
                    if (!v) break;
                    parts.push_back(*v);
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                  }
                  if (parts.size() != 4) throw Error(ErrorCode::invalid_bbox, "bbox must be minx,miny,maxx,maxy");
                  const std::string crs = req.has_param("crs") ? req.get_param_value("crs") : "EPSG:4326";
                  const std::string url =
                      build_wms_map_url(*it, {parts[0], parts[1], parts[2], parts[3]},
                                        static_cast<int>(number("width")), static_cast<int>(number("height")), crs);
                  send_json(res, {{"url", url}});
                }));

    server_.Get(R"(/documents/([^/]+)/content)",
                guarded([this](const httplib::Request& req, httplib::Response& res) { serve_content(req, res); }));

    server_.Post(R"(/scenes/([^/]+)/sessions)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto rec = require_scene(req.matches[1]);
      const auto body = parse_body(req);
      GuidanceMode mode = rec->scene.guidance.mode;
      if (const auto it = body.find("mode"); it != body.end()) {
        const auto m = it->is_string() ? guidance_mode_from_string(it->get<std::string>()) : std::nullopt;
        if (!m) throw Error(ErrorCode::invalid_parameter, "mode must be free, conditional or sequential").with_field_path("/mode");
        mode = *m;
      }
      const Session s = sessions_.create(rec->scene, mode);
      send_json(res, {{"session_id", s.session_id}, {"available", available_documents(s.state, rec->scene)}}, 201);
    }));

    server_.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Session s = require_session(req.matches[1]);
      const auto rec = require_scene(s.scene_id);
      send_json(res, session_json(s, rec->scene));
    }));

    server_.Post(R"(/sessions/([^/]+)/views)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string sid = req.matches[1];
      const Session current = require_session(sid);
      const auto rec = require_scene(current.scene_id);
      const auto body = parse_body(req);
      const auto it = body.find("document_id");
      if (it == body.end() || !it->is_string()) {
        throw Error(ErrorCode::field_error, "document_id is required").with_field_path("/document_id");
      }
      const Session s = sessions_.record(sid, it->get<std::string>(), rec->scene);
      send_json(res, {{"viewed", s.state.viewed}, {"available", available_documents(s.state, rec->scene)}});
    }));

    server_.Get(R"(/sessions/([^/]+)/pins)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Session s = require_session(req.matches[1]);
      const auto rec = require_scene(s.scene_id);
      nlohmann::json pins = nlohmann::json::array();
      for (const auto& p : apply_availability(rec->scene.pins, available_documents(s.state, rec->scene))) {
        nlohmann::json thumb = {{"image", p.thumbnail.image_source}};
        if (p.thumbnail.locked_image_source) thumb["locked_image"] = *p.thumbnail.locked_image_source;
        pins.push_back({{"id", p.entity_id},
                        {"document_id", p.document_id},
                        {"anchor", vec3_json(p.anchor)},
                        {"activated", p.activated},
                        {"panel_anchor", to_string(p.panel_anchor)},
                        {"thumbnail", std::move(thumb)}});
      }
      send_json(res, {{"pins", std::move(pins)}});
    }));

    server_.Post(R"(/sessions/([^/]+)/view-plans)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Session s = require_session(req.matches[1]);
      const auto rec = require_scene(s.scene_id);
      const auto body = parse_body(req);
      const auto id_it = body.find("entity_id");
      if (id_it == body.end() || !id_it->is_string()) {
        throw Error(ErrorCode::field_error, "entity_id is required").with_field_path("/entity_id");
      }
      const auto& entities = rec->scene.extended_documents;
      const auto e = std::find_if(entities.begin(), entities.end(), [&](const ExtendedDocumentEntity& x) {
        return x.entity_id == id_it->get<std::string>();
      });
      if (e == entities.end()) throw Error(ErrorCode::not_found, "unknown extended document '" + id_it->get<std::string>() + "'");
      if (!available_documents(s.state, rec->scene).contains(e->document_id)) {
        throw Error(ErrorCode::locked_content, "document '" + e->document_id + "' is locked").with_document(e->document_id);
      }
      CameraPose current = e->camera;
      if (const auto cam = body.find("camera"); cam != body.end()) {
        ExtensionBag scratch;
        geomedia::detail::ObjectReader r(*cam, "/camera");
        current.position = geomedia::detail::read_vec3(r.require("position"), r.child("position"), scratch);
        if (const auto* q = r.find("orientation")) {
          geomedia::detail::ObjectReader qr(*q, r.child("orientation"));
          current.orientation = Quaternion(qr.number("w"), qr.number("x"), qr.number("y"), qr.number("z"));
        }
      }
      const ViewPlan plan = build_view_plan(*e, current, rec->scene.documents, config_.travel);
      send_json(res, {{"duration_s", plan.travel.duration_s},
                      {"easing", to_string(plan.travel.easing)},
                      {"from", pose_json(plan.travel.from)},
                      {"to", pose_json(plan.travel.to)},
                      {"overlay_document_id", plan.overlay_document_id},
                      {"overlay_opacity", plan.overlay_opacity}});
    }));
  }

  void serve_content(const httplib::Request& req, httplib::Response& res) {
    DocumentRecord doc;
    {
      std::shared_lock lock(mutex_);
      const auto it = documents_.find(req.matches[1]);
      if (it == documents_.end()) throw Error(ErrorCode::not_found, "unknown document '" + std::string(req.matches[1]) + "'");
      doc = it->second;
    }
    const auto& source = doc.document.source;
    if (doc.document.kind == MediaKind::web_page && is_remote(source)) {
      res.set_redirect(source, 307);
      return;
    }
    if (doc.content_key) {
      auto blob = content_.get(*doc.content_key);
      if (!blob) throw Error(ErrorCode::not_found, "content for '" + doc.document.id + "' is not stored");
      res.set_header("ETag", "\"" + doc.content_key->substr(7) + "\"");
      res.set_header("Accept-Ranges", "bytes");
      res.set_content(std::move(blob->bytes), blob->media_type);
      return;
    }
    if (is_remote(source)) {
      proxy(source, res);
      return;
    }
    throw Error(ErrorCode::not_found, "content for '" + doc.document.id + "' is not stored");
  }

  static void proxy(const std::string& url, httplib::Response& res) {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client client(origin);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    client.set_follow_location(true);
    const auto upstream = client.Get(path);
    if (!upstream || upstream->status != 200) {
      send_json(res,
                {{"code", "bad-gateway"},
                 {"message", "source " + url + " unreachable" +
                                 (upstream ? " (status " + std::to_string(upstream->status) + ")"
                                           : " (" + httplib::to_string(upstream.error()) + ")")}},
                502);
      return;
    }
    const std::string type = upstream->has_header("Content-Type") ? upstream->get_header_value("Content-Type")
                                                                   : media_type_for_path(path);
    res.set_header("Accept-Ranges", "bytes");
    res.set_content(upstream->body, type);
  }

  ServiceConfig config_;
  ContentStore content_;
  mutable SessionStore sessions_;
  httplib::Server server_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const SceneRecord>> scenes_;
  std::map<std::string, DocumentRecord> documents_;
};

}  // namespace geomedia::service
