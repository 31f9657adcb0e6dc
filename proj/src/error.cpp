#include "genrecon/error.hpp"

namespace genrecon {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::missing_file: return "missing_file";
    case ErrorCode::malformed_png: return "malformed_png";
    case ErrorCode::unsupported_png: return "unsupported_png";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::image_too_small: return "image_too_small";
    case ErrorCode::obj_parse: return "obj_parse";
    case ErrorCode::zero_area: return "zero_area";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

void throw_invalid(const std::string& message) {
  throw Error(ErrorCode::invalid_argument, message);
}

}  // namespace genrecon
