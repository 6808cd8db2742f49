#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>

#include "geomedia/document.hpp"
#include "geomedia/error.hpp"
#include "geomedia/service/crypto.hpp"

namespace geomedia::service {

struct Blob {
  std::string bytes;
  std::string media_type;
  std::size_t length = 0;
};

inline std::string media_type_for_path(std::string_view path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string_view::npos) return "application/octet-stream";
  const std::string ext = geomedia::detail::ascii_lower(path.substr(dot + 1));
  static const std::map<std::string, std::string, std::less<>> kTypes{
      {"jpg", "image/jpeg"},  {"jpeg", "image/jpeg"}, {"png", "image/png"},        {"gif", "image/gif"},
      {"webp", "image/webp"}, {"bmp", "image/bmp"},   {"tif", "image/tiff"},       {"tiff", "image/tiff"},
      {"mp4", "video/mp4"},   {"m4v", "video/mp4"},   {"webm", "video/webm"},      {"mov", "video/quicktime"},
      {"ogv", "video/ogg"},   {"pdf", "application/pdf"}, {"txt", "text/plain; charset=utf-8"},
      {"md", "text/markdown; charset=utf-8"}, {"html", "text/html; charset=utf-8"},
      {"htm", "text/html; charset=utf-8"},
  };
  const auto it = kTypes.find(ext);
  return it == kTypes.end() ? "application/octet-stream" : it->second;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

/// Content-addressed blob store. Keys are "sha256:<hex>" of the bytes, so a
/// key always names the same content. With an empty directory the store
/// lives in memory only.
class ContentStore {
 public:
  ContentStore() = default;
  explicit ContentStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) {
      std::filesystem::create_directories(dir_);
      load_index();
    }
  }

  std::string put(std::string_view bytes, std::string media_type) {
    const std::string hex = sha256_hex(bytes);
    const std::string key = "sha256:" + hex;
    std::unique_lock lock(mutex_);
    if (index_.contains(key)) return key;
    if (!dir_.empty()) {
      write_atomically(dir_ / hex, bytes);
      write_atomically(dir_ / (hex + ".type"), media_type);
    } else {
      memory_.emplace(key, std::string(bytes));
    }
    index_.emplace(key, Entry{std::move(media_type), bytes.size()});
    return key;
  }

  std::optional<Blob> get(const std::string& key) const {
    std::shared_lock lock(mutex_);
    const auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    Blob blob{{}, it->second.media_type, it->second.length};
    if (dir_.empty()) {
      blob.bytes = memory_.at(key);
    } else {
      blob.bytes = read_file(dir_ / key.substr(7));
    }
    return blob;
  }

  bool contains(const std::string& key) const {
    std::shared_lock lock(mutex_);
    return index_.contains(key);
  }

 private:
  struct Entry {
    std::string media_type;
    std::size_t length = 0;
  };

  static void write_atomically(const std::filesystem::path& path, std::string_view bytes) {
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
  }

  void load_index() {
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      const auto name = entry.path().filename().string();
      if (name.size() != 64 || !entry.is_regular_file()) continue;
      const auto type_path = dir_ / (name + ".type");
      const std::string type =
          std::filesystem::exists(type_path) ? read_file(type_path) : "application/octet-stream";
      index_.emplace("sha256:" + name, Entry{type, static_cast<std::size_t>(entry.file_size())});
    }
  }

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> index_;
  std::map<std::string, std::string> memory_;
};

}  // namespace geomedia::service
