#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "genrecon/agent.hpp"
#include "genrecon/config.hpp"
#include "genrecon/manifest.hpp"
#include "genrecon/reward.hpp"

namespace genrecon {

/// Stable failure codes recorded in StageFailure::code.
namespace stage_error {
inline constexpr const char* spawn_failed = "spawn_failed";
inline constexpr const char* timeout = "timeout";
inline constexpr const char* nonzero_exit = "nonzero_exit";
inline constexpr const char* malformed_response = "malformed_response";
inline constexpr const char* worker_error = "worker_error";
inline constexpr const char* output_mismatch = "output_mismatch";
inline constexpr const char* missing_output = "missing_output";
inline constexpr const char* checksum_failed = "checksum_failed";
inline constexpr const char* invalid_output = "invalid_output";
inline constexpr const char* native_failed = "native_failed";
}  // namespace stage_error

struct StageContext {
  std::filesystem::path output_path;
  std::uint64_t seed = 42;
  AgentConfig agent;
  RewardWeights weights;
  std::optional<std::string> prompt;  // textgen only
};

/// Executes one stage. Failures never throw; they are returned in the
/// record's error field.
StageRecord run_stage(const StageConfig& stage, const std::optional<std::filesystem::path>& input,
                      const StageContext& ctx);

/// Either a text prompt (config starts with textgen) or an image path.
struct PipelineInput {
  std::optional<std::string> prompt;
  std::optional<std::filesystem::path> image;
};

/// `NN_<kind>.<ext>` for the 1-based stage position.
std::string artifact_name(std::size_t index, StageKind kind);

/// Runs every stage in order into cfg.output_dir and writes manifest.json
/// there, also when a stage fails. Throws ConfigError when the input does
/// not match the configured entry point and png errors for an unreadable
/// input image.
RunManifest run_pipeline(const PipelineConfig& cfg, const PipelineInput& input, std::uint64_t seed);

}  // namespace genrecon
