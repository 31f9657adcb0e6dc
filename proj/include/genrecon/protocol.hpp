#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "genrecon/error.hpp"

namespace genrecon {

using json = nlohmann::json;

enum class StageKind { textgen, enhance, delight, upscale, bgremove, recon3d, passthrough };

std::string_view to_string(StageKind kind);
std::optional<StageKind> parse_stage_kind(std::string_view name);

/// Stages that can run in-process.
bool supports_native(StageKind kind);
/// Output artifact extension for a stage ("png" or "obj").
std::string_view artifact_extension(StageKind kind);

inline constexpr int kProtocolVersion = 1;

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& message) : Error(ErrorCode::invalid_argument, message) {}
};

/// One request line sent to a worker on standard input.
struct WorkerRequest {
  int protocol_version = kProtocolVersion;
  StageKind stage = StageKind::passthrough;
  std::optional<std::string> input_path;  // absent for textgen
  std::string output_path;
  json params = json::object();

  json to_json() const;
  std::string to_line() const;  // compact JSON followed by '\n'
  static WorkerRequest from_json(const json& j);
  static WorkerRequest parse(std::string_view line);

  bool operator==(const WorkerRequest&) const = default;
};

/// One response line read from a worker's standard output.
struct WorkerResponse {
  enum class Status { ok, error };

  Status status = Status::ok;
  std::optional<std::string> output_path;  // required when ok
  std::string error_code;                  // required when error
  std::string message;
  json metadata = json::object();

  static WorkerResponse success(std::string output_path, json metadata = json::object());
  static WorkerResponse failure(std::string code, std::string message,
                                json metadata = json::object());

  json to_json() const;
  std::string to_line() const;
  static WorkerResponse from_json(const json& j);
  static WorkerResponse parse(std::string_view line);

  bool operator==(const WorkerResponse&) const = default;
};

}  // namespace genrecon
