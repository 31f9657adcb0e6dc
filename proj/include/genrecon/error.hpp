#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace genrecon {

enum class ErrorCode {
  invalid_argument,
  missing_file,
  malformed_png,
  unsupported_png,
  io_error,
  dimension_mismatch,
  image_too_small,
  obj_parse,
  zero_area,
  config,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void throw_invalid(const std::string& message);

}  // namespace genrecon
