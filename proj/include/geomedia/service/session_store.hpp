#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "geomedia/error.hpp"
#include "geomedia/scene.hpp"
#include "geomedia/service/crypto.hpp"

namespace geomedia::service {

inline std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t secs = system_clock::to_time_t(now);
  const auto millis = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  const std::size_t n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%.*s.%03lldZ", static_cast<int>(n), buf, static_cast<long long>(millis));
  return out;
}

struct Session {
  std::string session_id;
  std::string scene_id;
  GuidanceState state;
  std::string created_at;
  std::string updated_at;
};

/// Append-only log of session events, one JSON object per line, synced to
/// disk before a mutation is acknowledged.
class SessionJournal {
 public:
  SessionJournal() = default;
  explicit SessionJournal(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.empty()) return;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::io_error, "cannot open session journal " + path_.string());
  }
  SessionJournal(const SessionJournal&) = delete;
  SessionJournal& operator=(const SessionJournal&) = delete;
  ~SessionJournal() {
    if (fd_ >= 0) {
      ::fsync(fd_);
      ::close(fd_);
    }
  }

  const std::filesystem::path& path() const { return path_; }

  void append(const nlohmann::json& record) {
    if (fd_ < 0) return;
    const std::string line = record.dump() + "\n";
    std::lock_guard lock(mutex_);
    std::size_t written = 0;
    while (written < line.size()) {
      const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
      if (n < 0) throw Error(ErrorCode::io_error, "session journal write failed");
      written += static_cast<std::size_t>(n);
    }
    ::fdatasync(fd_);
  }

  void flush() {
    std::lock_guard lock(mutex_);
    if (fd_ >= 0) ::fsync(fd_);
  }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mutex_;
};

/// Guidance sessions keyed by unguessable tokens.
///
/// Mutations of one session are serialized by that session's own lock, so
/// concurrent view posts apply in a single total order and each one is
/// checked against the state left by its predecessor. Distinct sessions
/// proceed in parallel.
class SessionStore {
 public:
  using SceneLookup = std::function<const Scene*(const std::string&)>;

  SessionStore() = default;
  explicit SessionStore(std::filesystem::path journal_path) : journal_(std::move(journal_path)) {}

  /// Rebuilds sessions from the journal. Events that no longer apply to the
  /// current scenes are skipped. Returns the number of sessions restored.
  std::size_t replay(const SceneLookup& scenes) {
    if (journal_.path().empty() || !std::filesystem::exists(journal_.path())) return 0;
    std::ifstream in(journal_.path());
    std::string line;
    std::unique_lock lock(map_mutex_);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto rec = nlohmann::json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) continue;
      try {
        const std::string op = rec.at("op").get<std::string>();
        const std::string id = rec.at("session").get<std::string>();
        if (op == "create") {
          const Scene* scene = scenes(rec.at("scene").get<std::string>());
          const auto mode = guidance_mode_from_string(rec.at("mode").get<std::string>());
          if (scene == nullptr || !mode) continue;
          auto entry = std::make_shared<Entry>();
          entry->session = Session{id, scene->scene_id, new_session(*scene, *mode),
                                   rec.value("at", ""), rec.value("at", "")};
          sessions_[id] = std::move(entry);
        } else if (op == "view") {
          const auto it = sessions_.find(id);
          if (it == sessions_.end()) continue;
          Session& s = it->second->session;
          const Scene* scene = scenes(s.scene_id);
          if (scene == nullptr) continue;
          s.state = record_view(s.state, rec.at("document").get<std::string>(), *scene);
          s.updated_at = rec.value("at", s.updated_at);
        }
      } catch (const std::exception&) {
        // Stale event: the scene changed since it was written.
      }
    }
    return sessions_.size();
  }

  Session create(const Scene& scene, GuidanceMode mode) {
    GuidanceState state = new_session(scene, mode);
    auto entry = std::make_shared<Entry>();
    const std::string now = utc_timestamp();
    entry->session = Session{random_token(), scene.scene_id, std::move(state), now, now};
    journal_.append({{"op", "create"},
                     {"session", entry->session.session_id},
                     {"scene", scene.scene_id},
                     {"mode", to_string(mode)},
                     {"at", now}});
    std::unique_lock lock(map_mutex_);
    sessions_[entry->session.session_id] = entry;
    return entry->session;
  }

  std::optional<Session> get(const std::string& session_id) const {
    const auto entry = find(session_id);
    if (!entry) return std::nullopt;
    std::lock_guard lock(entry->mutex);
    return entry->session;
  }

  /// Applies one view. Throws not_found for unknown sessions and the
  /// guidance errors (locked_content, dangling_reference) otherwise.
  Session record(const std::string& session_id, const std::string& document_id, const Scene& scene) {
    const auto entry = find(session_id);
    if (!entry) throw Error(ErrorCode::not_found, "unknown session '" + session_id + "'");
    std::lock_guard lock(entry->mutex);
    GuidanceState next = record_view(entry->session.state, document_id, scene);
    if (next != entry->session.state) {
      const std::string now = utc_timestamp();
      journal_.append({{"op", "view"}, {"session", session_id}, {"document", document_id}, {"at", now}});
      entry->session.state = std::move(next);
      entry->session.updated_at = now;
    }
    return entry->session;
  }

  void flush() { journal_.flush(); }

  std::size_t size() const {
    std::shared_lock lock(map_mutex_);
    return sessions_.size();
  }

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(map_mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  SessionJournal journal_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace geomedia::service
