#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "genrecon/config.hpp"
#include "genrecon/protocol.hpp"

namespace genrecon {

inline constexpr const char* kToolVersion = GENRECON_VERSION;
inline constexpr const char* kManifestName = "manifest.json";

struct ArtifactRecord {
  std::filesystem::path path;
  std::string sha256;
};

struct StageFailure {
  std::string code;
  std::string message;
};

struct StageRecord {
  std::size_t index = 0;  // 1-based execution order
  StageKind kind = StageKind::passthrough;
  StageMode mode = StageMode::native;
  std::string started_at;
  std::string finished_at;
  std::optional<ArtifactRecord> input;
  std::optional<ArtifactRecord> output;
  json output_info = json::object();  // dimensions or mesh counts
  json record = json::object();       // stage-specific results
  json worker;                        // command, exit status, metadata (worker mode)
  std::optional<StageFailure> error;

  bool ok() const { return !error.has_value(); }
  json to_json() const;
};

struct RunManifest {
  json config;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  json input;
  std::vector<StageRecord> stages;
  std::filesystem::path path;  // where manifest.json was written

  bool ok() const;
  json to_json() const;
};

/// UTC ISO-8601 with millisecond precision.
std::string utc_timestamp();

/// Structural checks plus re-hashing of every referenced artifact. Returns
/// one message per problem; empty means the manifest verifies.
std::vector<std::string> verify_manifest(const json& manifest);
std::vector<std::string> verify_manifest_file(const std::filesystem::path& path);

/// Copy of a manifest with every timestamp field removed.
json strip_timestamps(json manifest);

}  // namespace genrecon
