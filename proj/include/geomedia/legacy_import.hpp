#pragma once

// Importer for the episode-based pin configuration used by earlier web
// documentaries:
//
//   "episode-1-data": {
//     "content-1": {
//       "lock": false,
//       "position": {"x": "1843554.77", "y": "5165405.73", "z": "220"},
//       "imgUnlock": "...", "imgLock": "...",
//       "text": "...", "src": "https://..."
//     }
//   }
//
// Each content entry becomes one pin plus one document. Episodes are chained
// for conditional access: every document of episode k+1 requires all
// documents of episode k. Comments are tolerated, and so is a bare member
// list without the enclosing braces.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geomedia/error.hpp"
#include "geomedia/scene.hpp"
#include "geomedia/scene_io.hpp"

namespace geomedia {

/// Media kind guessed from a source's file extension; anything unrecognised,
/// including plain http(s) pages, is a web page.
inline MediaKind infer_media_kind(std::string_view source) {
  std::string_view path = source;
  if (const auto cut = path.find_first_of("?#"); cut != std::string_view::npos) path = path.substr(0, cut);
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string_view::npos || (slash != std::string_view::npos && dot < slash)) {
    return MediaKind::web_page;
  }
  const std::string ext = detail::ascii_lower(path.substr(dot + 1));
  static const std::map<std::string, MediaKind, std::less<>> kByExtension{
      {"jpg", MediaKind::image},  {"jpeg", MediaKind::image},         {"png", MediaKind::image},
      {"webp", MediaKind::image}, {"bmp", MediaKind::image},          {"tif", MediaKind::image},
      {"tiff", MediaKind::image}, {"gif", MediaKind::animated_image}, {"apng", MediaKind::animated_image},
      {"mp4", MediaKind::video},  {"webm", MediaKind::video},         {"mov", MediaKind::video},
      {"ogv", MediaKind::video},  {"m4v", MediaKind::video},          {"pdf", MediaKind::pdf},
      {"txt", MediaKind::text},   {"md", MediaKind::text},
  };
  const auto it = kByExtension.find(ext);
  return it == kByExtension.end() ? MediaKind::web_page : it->second;
}

namespace detail {

/// Parses "<prefix>N<suffix>" and returns N.
inline std::optional<unsigned> numbered_key(std::string_view key, std::string_view prefix,
                                            std::string_view suffix) {
  if (key.size() <= prefix.size() + suffix.size() || !key.starts_with(prefix) || !key.ends_with(suffix)) {
    return std::nullopt;
  }
  const std::string_view digits = key.substr(prefix.size(), key.size() - prefix.size() - suffix.size());
  unsigned n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return n;
}

template <class T>
bool has_number(const std::vector<std::pair<unsigned, T>>& items, unsigned n) {
  return std::any_of(items.begin(), items.end(), [n](const auto& item) { return item.first == n; });
}

template <class T>
std::vector<std::pair<unsigned, T>> sorted_numbered(std::vector<std::pair<unsigned, T>> items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return items;
}

inline nlohmann::json parse_legacy_json(std::string_view bytes) {
  const auto first = std::find_if(bytes.begin(), bytes.end(),
                                  [](unsigned char c) { return !std::isspace(c); });
  std::string text;
  std::size_t shift = 0;
  if (first != bytes.end() && *first == '"') {
    text = "{" + std::string(bytes) + "\n}";
    shift = 1;
  } else {
    text = std::string(bytes);
  }
  try {
    return nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = e.byte > shift ? e.byte - shift : e.byte;
    throw Error(ErrorCode::syntax_error, std::string("malformed episode file: ") + e.what())
        .with_byte_offset(offset);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::syntax_error, std::string("malformed episode file: ") + e.what());
  }
}

}  // namespace detail

/// Converts an episode file into a scene. `scene_id` names the result.
inline Scene import_legacy_episode(std::string_view bytes, std::string scene_id = "legacy-import") {
  using detail::field_error;
  using nlohmann::json;
  const json root = detail::parse_legacy_json(bytes);
  if (!root.is_object()) throw field_error("/", "expected object of episodes");

  Scene scene;
  scene.scene_id = std::move(scene_id);
  scene.title = scene.scene_id;
  scene.crs_note = "imported from legacy episode file; coordinates are projected scene coordinates "
                   "with an unspecified CRS";
  scene.guidance.mode = GuidanceMode::conditional;

  std::vector<std::pair<unsigned, std::string>> episodes;
  for (auto it = root.begin(); it != root.end(); ++it) {
    const auto n = detail::numbered_key(it.key(), "episode-", "-data");
    if (!n) throw field_error("/" + it.key(), "expected key of the form 'episode-N-data'");
    if (detail::has_number(episodes, *n)) throw field_error("/" + it.key(), "duplicate episode number");
    episodes.emplace_back(*n, it.key());
  }

  DocumentIdSet previous_episode;
  for (const auto& [episode_no, episode_key] : detail::sorted_numbered(std::move(episodes))) {
    const json& episode = root.at(episode_key);
    const std::string episode_path = "/" + episode_key;
    if (!episode.is_object()) throw field_error(episode_path, "expected object of contents");

    std::vector<std::pair<unsigned, std::string>> contents;
    for (auto it = episode.begin(); it != episode.end(); ++it) {
      const auto n = detail::numbered_key(it.key(), "content-", "");
      if (!n) throw field_error(episode_path + "/" + it.key(), "expected key of the form 'content-N'");
      if (detail::has_number(contents, *n)) throw field_error(episode_path + "/" + it.key(), "duplicate content number");
      contents.emplace_back(*n, it.key());
    }

    DocumentIdSet this_episode;
    for (const auto& [content_no, content_key] : detail::sorted_numbered(std::move(contents))) {
      const std::string path = episode_path + "/" + content_key;
      detail::ObjectReader entry(episode.at(content_key), path);

      const std::string doc_id = "episode-" + std::to_string(episode_no) + "-content-" +
                                 std::to_string(content_no);
      MultimediaDocument doc;
      doc.id = doc_id;
      doc.source = entry.string("src");
      if (doc.source.empty()) throw field_error(entry.child("src"), "source is empty");
      doc.kind = infer_media_kind(doc.source);
      doc.title = entry.string_or("text", "");
      doc.tags.insert("episode-" + std::to_string(episode_no));

      GeoPin pin;
      pin.entity_id = "pin-" + doc_id;
      pin.document_id = doc_id;
      pin.anchor = detail::read_vec3(entry.require("position"), entry.child("position"), scene.extensions);
      pin.activated = !entry.boolean_or("lock", false);
      pin.panel_anchor = ScreenAnchor::left;
      pin.thumbnail.document_id = doc_id;
      const auto unlocked = entry.optional_string("imgUnlock");
      pin.thumbnail.locked_image_source = entry.optional_string("imgLock");
      if (unlocked && !unlocked->empty()) {
        pin.thumbnail.image_source = *unlocked;
      } else if (pin.thumbnail.locked_image_source && !pin.thumbnail.locked_image_source->empty()) {
        pin.thumbnail.image_source = *pin.thumbnail.locked_image_source;
      } else {
        throw field_error(entry.child("imgUnlock"), "entry has no thumbnail image");
      }

      if (!previous_episode.empty()) scene.guidance.graph.prerequisites[doc_id] = previous_episode;
      this_episode.insert(doc_id);
      scene.documents.push_back(std::move(doc));
      scene.pins.push_back(std::move(pin));
    }
    if (!this_episode.empty()) previous_episode = std::move(this_episode);
  }
  // Extension paths refer to the legacy layout, not to the scene file.
  scene.extensions.clear();
  return scene;
}

}  // namespace geomedia
