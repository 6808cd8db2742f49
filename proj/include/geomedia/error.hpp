#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace geomedia {

enum class ErrorCode {
  invalid_coordinate,
  degenerate_view,
  parameter_range,
  invalid_pose,
  invalid_range,
  invalid_size,
  invalid_parameter,
  invalid_bbox,
  empty_slideshow,
  unsupported_media,
  locked_content,
  dangling_reference,
  misconfigured_guidance,
  syntax_error,
  field_error,
  not_found,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_coordinate: return "invalid-coordinate";
    case ErrorCode::degenerate_view: return "degenerate-view";
    case ErrorCode::parameter_range: return "parameter-range";
    case ErrorCode::invalid_pose: return "invalid-pose";
    case ErrorCode::invalid_range: return "invalid-range";
    case ErrorCode::invalid_size: return "invalid-size";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::invalid_bbox: return "invalid-bbox";
    case ErrorCode::empty_slideshow: return "empty-slideshow";
    case ErrorCode::unsupported_media: return "unsupported-media";
    case ErrorCode::locked_content: return "locked-content";
    case ErrorCode::dangling_reference: return "dangling-reference";
    case ErrorCode::misconfigured_guidance: return "misconfigured-guidance";
    case ErrorCode::syntax_error: return "syntax-error";
    case ErrorCode::field_error: return "field-error";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

/// Every failure raised by the library. Carries a machine-readable code plus
/// optional context: a JSON-pointer-like field path for config errors, the
/// byte offset of a syntax error, or the document a locked/dangling error
/// refers to.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::string>& field_path() const noexcept { return field_path_; }
  const std::optional<std::size_t>& byte_offset() const noexcept { return byte_offset_; }
  const std::optional<std::string>& document_id() const noexcept { return document_id_; }

  Error&& with_field_path(std::string path) && {
    field_path_ = std::move(path);
    return std::move(*this);
  }
  Error&& with_byte_offset(std::size_t offset) && {
    byte_offset_ = offset;
    return std::move(*this);
  }
  Error&& with_document(std::string id) && {
    document_id_ = std::move(id);
    return std::move(*this);
  }

 private:
  ErrorCode code_;
  std::optional<std::string> field_path_;
  std::optional<std::size_t> byte_offset_;
  std::optional<std::string> document_id_;
};

}  // namespace geomedia
