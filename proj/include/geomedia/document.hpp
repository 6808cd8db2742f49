#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geomedia/error.hpp"

namespace geomedia {

enum class MediaKind { image, animated_image, video, video_360, text, pdf, web_page };

inline constexpr std::array kAllMediaKinds{MediaKind::image,     MediaKind::animated_image,
                                           MediaKind::video,     MediaKind::video_360,
                                           MediaKind::text,      MediaKind::pdf,
                                           MediaKind::web_page};

constexpr std::string_view to_string(MediaKind kind) {
  switch (kind) {
    case MediaKind::image: return "image";
    case MediaKind::animated_image: return "animated_image";
    case MediaKind::video: return "video";
    case MediaKind::video_360: return "video_360";
    case MediaKind::text: return "text";
    case MediaKind::pdf: return "pdf";
    case MediaKind::web_page: return "web_page";
  }
  return "web_page";
}

inline std::optional<MediaKind> media_kind_from_string(std::string_view name) {
  for (MediaKind k : kAllMediaKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

inline bool is_video(MediaKind kind) {
  return kind == MediaKind::video || kind == MediaKind::video_360;
}

using Date = std::chrono::year_month_day;

/// Parses an ISO calendar date "YYYY-MM-DD" (four-digit year).
inline std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int value = 0;
    const char* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len) return std::nullopt;
    return value;
  };
  const auto y = field(0, 4);
  const auto m = field(5, 2);
  const auto d = field(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

struct MultimediaDocument {
  std::string id;
  MediaKind kind = MediaKind::web_page;
  std::string source;  // URI, scene-relative path, or "sha256:<hex>" content key
  std::string title;
  std::string description;
  std::string provenance_source;
  std::optional<Date> publication_date;
  std::optional<Date> reference_date;  // the date the content depicts
  std::set<std::string> tags;

  friend bool operator==(const MultimediaDocument&, const MultimediaDocument&) = default;
};

struct Thumbnail {
  std::string document_id;
  std::string image_source;
  std::optional<std::string> locked_image_source;

  friend bool operator==(const Thumbnail&, const Thumbnail&) = default;
};

struct DateRange {
  Date start;
  Date end;
};

/// Conjunctive document filter; absent criteria match everything.
struct DocumentFilter {
  std::optional<std::string> title_substring;
  std::optional<DateRange> date_range;  // inclusive, on reference_date
  std::optional<std::set<std::string>> tags;  // document must carry every listed tag
  std::optional<std::set<MediaKind>> kinds;
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace detail

inline bool matches(const MultimediaDocument& doc, const DocumentFilter& filter) {
  if (filter.title_substring &&
      detail::ascii_lower(doc.title).find(detail::ascii_lower(*filter.title_substring)) ==
          std::string::npos) {
    return false;
  }
  if (filter.date_range) {
    if (!doc.reference_date) return false;
    if (*doc.reference_date < filter.date_range->start || *doc.reference_date > filter.date_range->end)
      return false;
  }
  if (filter.tags && !std::includes(doc.tags.begin(), doc.tags.end(), filter.tags->begin(),
                                    filter.tags->end())) {
    return false;
  }
  if (filter.kinds && !filter.kinds->contains(doc.kind)) return false;
  return true;
}

/// Documents satisfying every present criterion, in input order.
inline std::vector<MultimediaDocument> filter_documents(const std::vector<MultimediaDocument>& docs,
                                                        const DocumentFilter& filter) {
  if (filter.date_range && filter.date_range->start > filter.date_range->end) {
    throw Error(ErrorCode::invalid_range, "date range start is after its end");
  }
  std::vector<MultimediaDocument> out;
  std::copy_if(docs.begin(), docs.end(), std::back_inserter(out),
               [&](const MultimediaDocument& d) { return matches(d, filter); });
  return out;
}

/// Stable chronological order; undated documents go last, in input order.
inline std::vector<MultimediaDocument> sort_by_reference_date(std::vector<MultimediaDocument> docs) {
  std::stable_sort(docs.begin(), docs.end(),
                   [](const MultimediaDocument& a, const MultimediaDocument& b) {
                     if (!a.reference_date) return false;
                     if (!b.reference_date) return true;
                     return *a.reference_date < *b.reference_date;
                   });
  return docs;
}

}  // namespace geomedia
