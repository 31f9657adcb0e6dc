#include "genrecon/config.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

namespace genrecon {

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& message) {
  throw ConfigError(ConfigErrorKind::schema, pointer, message);
}

void only_keys(const json& j, const std::string& ptr, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) schema_error(ptr.empty() ? "/" : ptr, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) schema_error(ptr + "/" + key, "unknown key");
  }
}

double get_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) schema_error(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema_error(ptr, "expected a finite number");
  return v;
}

std::uint64_t get_uint(const json& j, const std::string& ptr) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    schema_error(ptr, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

int get_positive_int(const json& j, const std::string& ptr) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1 || j.get<std::int64_t>() > 1'000'000'000) {
    schema_error(ptr, "expected a positive integer");
  }
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& ptr) {
  if (!j.is_string()) schema_error(ptr, "expected a string");
  return j.get<std::string>();
}

RewardWeights parse_weights(const json& j, const std::string& ptr) {
  only_keys(j, ptr, {"exposure", "spatial", "contrast", "colorfulness", "exposure_target",
                     "ssim_floor", "ssim_penalty"});
  RewardWeights w;
  auto field = [&](const char* key, double& dst, bool non_negative) {
    if (!j.contains(key)) return;
    dst = get_number(j[key], ptr + "/" + key);
    if (non_negative && dst < 0.0) schema_error(ptr + "/" + key, "must be >= 0");
  };
  field("exposure", w.exposure, true);
  field("spatial", w.spatial, true);
  field("contrast", w.contrast, true);
  field("colorfulness", w.colorfulness, true);
  field("exposure_target", w.exposure_target, false);
  field("ssim_floor", w.ssim_floor, false);
  field("ssim_penalty", w.ssim_penalty, true);
  return w;
}

void parse_agent(const json& j, const std::string& ptr, PipelineConfig& cfg) {
  only_keys(j, ptr, {"budget", "seed", "algorithm", "eval_resolution"});
  if (j.contains("budget")) cfg.agent.budget = get_positive_int(j["budget"], ptr + "/budget");
  if (j.contains("seed")) cfg.agent_seed = get_uint(j["seed"], ptr + "/seed");
  if (j.contains("eval_resolution")) {
    cfg.agent.eval_resolution = get_positive_int(j["eval_resolution"], ptr + "/eval_resolution");
  }
  if (j.contains("algorithm")) {
    const auto a = parse_algorithm(get_string(j["algorithm"], ptr + "/algorithm"));
    if (!a) schema_error(ptr + "/algorithm", "expected 'random_search' or 'mc_control'");
    cfg.agent.algorithm = *a;
  }
}

void check_native_params(const StageConfig& s, const std::string& ptr) {
  if (s.kind == StageKind::bgremove) {
    only_keys(s.params, ptr, {"threshold"});
    if (s.params.contains("threshold")) {
      const double t = get_number(s.params["threshold"], ptr + "/threshold");
      if (!(t > 0.0)) schema_error(ptr + "/threshold", "must be > 0");
    }
  } else {
    only_keys(s.params, ptr, {});
  }
}

StageConfig parse_stage(const json& j, const std::string& ptr) {
  only_keys(j, ptr, {"kind", "mode", "command", "params", "timeout_s"});
  StageConfig s;
  if (!j.contains("kind")) schema_error(ptr + "/kind", "missing required key");
  const auto kind = parse_stage_kind(get_string(j["kind"], ptr + "/kind"));
  if (!kind) schema_error(ptr + "/kind", "unknown stage kind");
  s.kind = *kind;
  if (!j.contains("mode")) schema_error(ptr + "/mode", "missing required key");
  const std::string mode = get_string(j["mode"], ptr + "/mode");
  if (mode == "native") {
    s.mode = StageMode::native;
  } else if (mode == "worker") {
    s.mode = StageMode::worker;
  } else {
    schema_error(ptr + "/mode", "expected 'native' or 'worker'");
  }
  if (j.contains("command")) {
    const json& c = j["command"];
    if (!c.is_array()) schema_error(ptr + "/command", "expected an array of strings");
    for (std::size_t i = 0; i < c.size(); ++i) {
      s.command.push_back(get_string(c[i], ptr + "/command/" + std::to_string(i)));
    }
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) schema_error(ptr + "/params", "expected an object");
    s.params = j["params"];
  }
  if (j.contains("timeout_s")) {
    s.timeout_s = get_number(j["timeout_s"], ptr + "/timeout_s");
    if (!(s.timeout_s > 0.0)) schema_error(ptr + "/timeout_s", "must be > 0");
  }
  return s;
}

}  // namespace

std::string_view to_string(StageMode mode) { return mode == StageMode::native ? "native" : "worker"; }

ConfigError::ConfigError(ConfigErrorKind kind, std::string pointer, const std::string& message)
    : Error(ErrorCode::config, "config " + pointer + ": " + message),
      kind_(kind),
      pointer_(std::move(pointer)) {}

bool PipelineConfig::starts_from_prompt() const {
  return !stages.empty() && stages.front().kind == StageKind::textgen;
}

void PipelineConfig::validate() const {
  if (stages.empty()) schema_error("/stages", "at least one stage is required");
  std::set<StageKind> seen;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const StageConfig& s = stages[i];
    const std::string ptr = "/stages/" + std::to_string(i);
    if (!seen.insert(s.kind).second) {
      throw ConfigError(ConfigErrorKind::duplicate_stage, ptr + "/kind",
                        "duplicate stage '" + std::string(to_string(s.kind)) + "'");
    }
    if (s.mode == StageMode::native && !supports_native(s.kind)) {
      throw ConfigError(ConfigErrorKind::unsupported_mode, ptr + "/mode",
                        "stage '" + std::string(to_string(s.kind)) + "' requires worker mode");
    }
    if (s.mode == StageMode::worker && s.command.empty()) {
      schema_error(ptr + "/command", "worker mode requires a non-empty command");
    }
    if (s.mode == StageMode::native && !s.command.empty()) {
      schema_error(ptr + "/command", "native stages take no command");
    }
    if (s.mode == StageMode::native) check_native_params(s, ptr + "/params");
    if (s.kind == StageKind::textgen && i != 0) {
      schema_error(ptr + "/kind", "textgen must be the first stage");
    }
    if (i > 0 && stages[i - 1].kind == StageKind::recon3d) {
      schema_error(ptr, "no stage may follow recon3d");
    }
    if (!(s.timeout_s > 0.0)) schema_error(ptr + "/timeout_s", "must be > 0");
  }
  try {
    reward_weights.validate();
    AgentConfig a = agent;
    a.validate();
  } catch (const Error& e) {
    schema_error("/", e.what());
  }
}

json PipelineConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir.string();
  j["reward_weights"] = {{"exposure", reward_weights.exposure},
                         {"spatial", reward_weights.spatial},
                         {"contrast", reward_weights.contrast},
                         {"colorfulness", reward_weights.colorfulness},
                         {"exposure_target", reward_weights.exposure_target},
                         {"ssim_floor", reward_weights.ssim_floor},
                         {"ssim_penalty", reward_weights.ssim_penalty}};
  json a = {{"budget", agent.budget},
            {"algorithm", std::string(to_string(agent.algorithm))},
            {"eval_resolution", agent.eval_resolution}};
  if (agent_seed) a["seed"] = *agent_seed;
  j["agent"] = a;
  json stages_json = json::array();
  for (const StageConfig& s : stages) {
    json sj = {{"kind", std::string(to_string(s.kind))},
               {"mode", std::string(to_string(s.mode))},
               {"params", s.params},
               {"timeout_s", s.timeout_s}};
    if (!s.command.empty()) sj["command"] = s.command;
    stages_json.push_back(sj);
  }
  j["stages"] = stages_json;
  return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  only_keys(j, "", {"seed", "output_dir", "reward_weights", "agent", "stages"});
  PipelineConfig cfg;
  if (j.contains("seed")) cfg.seed = get_uint(j["seed"], "/seed");
  if (j.contains("output_dir")) cfg.output_dir = get_string(j["output_dir"], "/output_dir");
  if (j.contains("reward_weights")) cfg.reward_weights = parse_weights(j["reward_weights"], "/reward_weights");
  if (j.contains("agent")) parse_agent(j["agent"], "/agent", cfg);
  if (!j.contains("stages")) schema_error("/stages", "missing required key");
  const json& stages = j["stages"];
  if (!stages.is_array()) schema_error("/stages", "expected an array");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    cfg.stages.push_back(parse_stage(stages[i], "/stages/" + std::to_string(i)));
  }
  cfg.validate();
  return cfg;
}

PipelineConfig parse_config(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) schema_error("/", "invalid JSON");
  return PipelineConfig::from_json(j);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorKind::unreadable, "/", path.string() + ": cannot read");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

}  // namespace genrecon
