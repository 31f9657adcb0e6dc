#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "genrecon/agent.hpp"
#include "genrecon/protocol.hpp"
#include "genrecon/reward.hpp"

namespace genrecon {

enum class StageMode { native, worker };
std::string_view to_string(StageMode mode);

enum class ConfigErrorKind { schema, duplicate_stage, unsupported_mode, unreadable };

/// Configuration problem located by a JSON pointer such as "/stages/1/mode".
class ConfigError : public Error {
 public:
  ConfigError(ConfigErrorKind kind, std::string pointer, const std::string& message);

  ConfigErrorKind kind() const noexcept { return kind_; }
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  ConfigErrorKind kind_;
  std::string pointer_;
};

struct StageConfig {
  StageKind kind = StageKind::passthrough;
  StageMode mode = StageMode::native;
  std::vector<std::string> command;  // argv, worker mode only
  json params = json::object();
  double timeout_s = 300.0;
};

struct PipelineConfig {
  std::vector<StageConfig> stages;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";
  RewardWeights reward_weights;
  /// Agent search settings; its seed is taken from agent_seed, or the run
  /// seed when unset.
  AgentConfig agent;
  std::optional<std::uint64_t> agent_seed;

  bool starts_from_prompt() const;
  void validate() const;
  json to_json() const;
  static PipelineConfig from_json(const json& j);
};

PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace genrecon
