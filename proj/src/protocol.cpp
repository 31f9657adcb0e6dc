#include "genrecon/protocol.hpp"

#include <filesystem>

namespace genrecon {

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                    const char* what) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ProtocolError(std::string(what) + ": unknown field '" + key + "'");
  }
}

const json& require(const json& j, const char* key, const char* what) {
  const auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string(what) + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key, const char* what) {
  const json& v = require(j, key, what);
  if (!v.is_string()) throw ProtocolError(std::string(what) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string require_absolute(const json& j, const char* key, const char* what) {
  std::string p = require_string(j, key, what);
  if (!std::filesystem::path(p).is_absolute()) {
    throw ProtocolError(std::string(what) + ": '" + key + "' must be an absolute path");
  }
  return p;
}

json parse_line(std::string_view line, const char* what) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  if (line.find('\n') != std::string_view::npos) {
    throw ProtocolError(std::string(what) + ": message spans more than one line");
  }
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ProtocolError(std::string(what) + ": invalid JSON");
  if (!j.is_object()) throw ProtocolError(std::string(what) + ": message must be a JSON object");
  return j;
}

}  // namespace

std::string_view to_string(StageKind kind) {
  switch (kind) {
    case StageKind::textgen: return "textgen";
    case StageKind::enhance: return "enhance";
    case StageKind::delight: return "delight";
    case StageKind::upscale: return "upscale";
    case StageKind::bgremove: return "bgremove";
    case StageKind::recon3d: return "recon3d";
    case StageKind::passthrough: return "passthrough";
  }
  return "unknown";
}

std::optional<StageKind> parse_stage_kind(std::string_view name) {
  for (StageKind k : {StageKind::textgen, StageKind::enhance, StageKind::delight, StageKind::upscale,
                      StageKind::bgremove, StageKind::recon3d, StageKind::passthrough}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool supports_native(StageKind kind) {
  return kind == StageKind::enhance || kind == StageKind::upscale || kind == StageKind::bgremove ||
         kind == StageKind::passthrough;
}

std::string_view artifact_extension(StageKind kind) {
  return kind == StageKind::recon3d ? "obj" : "png";
}

json WorkerRequest::to_json() const {
  json j;
  j["protocol_version"] = protocol_version;
  j["stage"] = std::string(to_string(stage));
  if (input_path) j["input_path"] = *input_path;
  j["output_path"] = output_path;
  j["params"] = params;
  return j;
}

std::string WorkerRequest::to_line() const { return to_json().dump() + "\n"; }

WorkerRequest WorkerRequest::from_json(const json& j) {
  constexpr const char* what = "worker request";
  if (!j.is_object()) throw ProtocolError("worker request must be a JSON object");
  reject_unknown(j, {"protocol_version", "stage", "input_path", "output_path", "params"}, what);
  WorkerRequest r;
  const json& v = require(j, "protocol_version", what);
  if (!v.is_number_integer()) throw ProtocolError("worker request: protocol_version must be an integer");
  r.protocol_version = v.get<int>();
  const auto kind = parse_stage_kind(require_string(j, "stage", what));
  if (!kind) throw ProtocolError("worker request: unknown stage kind");
  r.stage = *kind;
  if (j.contains("input_path")) r.input_path = require_absolute(j, "input_path", what);
  r.output_path = require_absolute(j, "output_path", what);
  const json& params = require(j, "params", what);
  if (!params.is_object()) throw ProtocolError("worker request: params must be an object");
  r.params = params;
  return r;
}

WorkerRequest WorkerRequest::parse(std::string_view line) {
  return from_json(parse_line(line, "worker request"));
}

WorkerResponse WorkerResponse::success(std::string output_path, json metadata) {
  WorkerResponse r;
  r.status = Status::ok;
  r.output_path = std::move(output_path);
  r.metadata = std::move(metadata);
  return r;
}

WorkerResponse WorkerResponse::failure(std::string code, std::string message, json metadata) {
  WorkerResponse r;
  r.status = Status::error;
  r.error_code = std::move(code);
  r.message = std::move(message);
  r.metadata = std::move(metadata);
  return r;
}

json WorkerResponse::to_json() const {
  json j;
  j["status"] = status == Status::ok ? "ok" : "error";
  if (status == Status::ok) {
    j["output_path"] = output_path.value_or("");
  } else {
    j["error_code"] = error_code;
    j["message"] = message;
  }
  j["metadata"] = metadata;
  return j;
}

std::string WorkerResponse::to_line() const { return to_json().dump() + "\n"; }

WorkerResponse WorkerResponse::from_json(const json& j) {
  constexpr const char* what = "worker response";
  if (!j.is_object()) throw ProtocolError("worker response must be a JSON object");
  reject_unknown(j, {"status", "output_path", "error_code", "message", "metadata"}, what);
  WorkerResponse r;
  const std::string status = require_string(j, "status", what);
  if (status == "ok") {
    r.status = Status::ok;
    r.output_path = require_absolute(j, "output_path", what);
    if (j.contains("error_code") || j.contains("message")) {
      throw ProtocolError("worker response: ok responses carry no error fields");
    }
  } else if (status == "error") {
    r.status = Status::error;
    r.error_code = require_string(j, "error_code", what);
    r.message = require_string(j, "message", what);
    if (j.contains("output_path")) {
      throw ProtocolError("worker response: error responses carry no output_path");
    }
  } else {
    throw ProtocolError("worker response: status must be 'ok' or 'error'");
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw ProtocolError("worker response: metadata must be an object");
    r.metadata = j["metadata"];
  }
  return r;
}

WorkerResponse WorkerResponse::parse(std::string_view line) {
  return from_json(parse_line(line, "worker response"));
}

}  // namespace genrecon
