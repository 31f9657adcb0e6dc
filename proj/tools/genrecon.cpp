// genrecon command-line entry point. Machine-readable results go to standard
// output as a single JSON document; diagnostics go to standard error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "genrecon/agent.hpp"
#include "genrecon/config.hpp"
#include "genrecon/json_io.hpp"
#include "genrecon/manifest.hpp"
#include "genrecon/mesh.hpp"
#include "genrecon/pipeline.hpp"
#include "genrecon/png_io.hpp"
#include "genrecon/reward.hpp"

namespace {

using namespace genrecon;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kStageFailure = 3, kInvalidInput = 4 };

constexpr std::uint64_t kDefaultSeed = 42;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::config:
    case ErrorCode::invalid_argument:
      return kUsage;
    default:
      return kInvalidInput;
  }
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

void add_weight_flags(CLI::App* cmd, RewardWeights& w) {
  cmd->add_option("--w-exposure", w.exposure, "Exposure loss weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--w-spatial", w.spatial, "Spatial consistency weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--w-contrast", w.contrast, "Contrast bonus weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--w-colorfulness", w.colorfulness, "Colorfulness bonus weight")
      ->check(CLI::NonNegativeNumber);
}

struct EnhanceArgs {
  std::string input;
  std::string output;
  std::string sidecar;
  int budget = 200;
  std::uint64_t seed = kDefaultSeed;
  std::string algo = "random_search";
  int eval_resolution = 256;
  RewardWeights weights;
};

int cmd_enhance(const EnhanceArgs& a) {
  AgentConfig cfg;
  cfg.budget = a.budget;
  cfg.seed = a.seed;
  cfg.algorithm = *parse_algorithm(a.algo);
  cfg.eval_resolution = a.eval_resolution;
  const Image img = load_png(a.input);
  const EnhanceResult r = enhance(img, cfg, a.weights);
  save_png(r.image, a.output);

  const fs::path sidecar = a.sidecar.empty() ? fs::path(a.output).replace_extension(".json") : fs::path(a.sidecar);
  json side = to_json(r.search);
  side["input"] = a.input;
  side["output"] = a.output;
  side["seed"] = cfg.seed;
  side["budget"] = cfg.budget;
  side["weights"] = to_json(a.weights);
  std::ofstream out(sidecar, std::ios::trunc);
  out << side.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::io_error, sidecar.string() + ": cannot write sidecar");

  emit({{"output", a.output},
        {"sidecar", sidecar.string()},
        {"total", r.search.reward.total},
        {"identity_total", r.search.identity_reward.total}});
  return kOk;
}

struct MetricsArgs {
  std::string a;
  std::string b;
  std::vector<std::string> which;
  RewardWeights weights;
};

int cmd_metrics(const MetricsArgs& m) {
  const Image a = load_png(m.a);
  const Image b = load_png(m.b);
  json out = json::object();
  const std::vector<std::string> which = m.which.empty() ? std::vector<std::string>{"ssim"} : m.which;
  for (const std::string& w : which) {
    if (w == "ssim") out["ssim"] = ssim(a, b);
    if (w == "msssim") out["msssim"] = ms_ssim(a, b);
    if (w == "reward") {
      out["reward"] = to_json(reward(a, b, m.weights));
      out["weights"] = to_json(m.weights);
    }
  }
  emit(out);
  return kOk;
}

struct MeshEvalArgs {
  std::string a;
  std::string b;
  std::size_t points = 2048;
  double tau = 0.1;
  std::uint64_t seed = kDefaultSeed;
  bool seed_both = false;
  bool normalize = false;
};

int cmd_mesh_eval(const MeshEvalArgs& m) {
  const Mesh a = load_obj(m.a);
  const Mesh b = load_obj(m.b);
  const std::uint64_t seed_b = m.seed_both ? m.seed : m.seed + 1;
  emit(to_json(eval_meshes(a, b, m.points, m.tau, m.seed, seed_b, m.normalize)));
  return kOk;
}

struct PipelineArgs {
  std::string config;
  std::optional<std::string> prompt;
  std::optional<std::string> image;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

int cmd_pipeline_run(const PipelineArgs& p) {
  PipelineConfig cfg = load_config(p.config);
  if (p.out_dir) cfg.output_dir = *p.out_dir;
  const std::uint64_t seed = p.seed.value_or(cfg.seed);
  PipelineInput input;
  input.prompt = p.prompt;
  if (p.image) input.image = *p.image;
  const RunManifest m = run_pipeline(cfg, input, seed);
  json out = {{"manifest", m.path.string()}, {"status", m.ok() ? "ok" : "failed"}};
  for (const StageRecord& s : m.stages) {
    if (!s.ok()) {
      out["failed_stage"] = {{"index", s.index},
                             {"kind", std::string(to_string(s.kind))},
                             {"code", s.error->code},
                             {"message", s.error->message}};
    }
  }
  emit(out);
  return m.ok() ? kOk : kStageFailure;
}

int cmd_pipeline_verify(const std::string& path) {
  const auto problems = verify_manifest_file(path);
  emit({{"manifest", path}, {"valid", problems.empty()}, {"problems", problems}});
  return problems.empty() ? kOk : kInvalidInput;
}

struct StageArgs {
  std::string kind;
  std::string mode = "native";
  std::optional<std::string> input;
  std::string output;
  std::vector<std::string> command;
  std::string params = "{}";
  double timeout = 300.0;
  std::optional<std::string> prompt;
  std::uint64_t seed = kDefaultSeed;
  int budget = 200;
  std::string algo = "random_search";
};

int cmd_stage(const StageArgs& a) {
  StageConfig stage;
  stage.kind = *parse_stage_kind(a.kind);
  stage.mode = a.mode == "worker" ? StageMode::worker : StageMode::native;
  stage.command = a.command;
  stage.timeout_s = a.timeout;
  stage.params = json::parse(a.params, nullptr, false);
  if (stage.params.is_discarded() || !stage.params.is_object()) {
    throw ConfigError(ConfigErrorKind::schema, "/params", "--params must be a JSON object");
  }
  PipelineConfig single;
  single.stages = {stage};
  single.validate();

  StageContext ctx;
  ctx.output_path = fs::absolute(a.output).lexically_normal();
  ctx.seed = a.seed;
  ctx.agent.seed = a.seed;
  ctx.agent.budget = a.budget;
  ctx.agent.algorithm = *parse_algorithm(a.algo);
  ctx.prompt = a.prompt;
  std::optional<fs::path> input;
  if (a.input) input = fs::absolute(*a.input).lexically_normal();
  if (!input && stage.kind != StageKind::textgen) {
    throw ConfigError(ConfigErrorKind::schema, "/input", "--input is required for this stage");
  }
  StageRecord rec = run_stage(stage, input, ctx);
  rec.index = 1;
  emit(rec.to_json());
  return rec.ok() ? kOk : kStageFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genrecon: enhancement agent, image metrics, mesh evaluation and pipeline runner"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::function<int()> action;

  EnhanceArgs enh;
  auto* c_enh = app.add_subcommand("enhance", "Search enhancement parameters and write the enhanced image");
  c_enh->add_option("input", enh.input, "Input PNG")->required();
  c_enh->add_option("output", enh.output, "Output PNG")->required();
  c_enh->add_option("--sidecar", enh.sidecar, "Sidecar JSON path (default: output with .json)");
  c_enh->add_option("--budget", enh.budget, "Episodes / samples K")->check(CLI::PositiveNumber);
  c_enh->add_option("--seed", enh.seed, "RNG seed");
  c_enh->add_option("--algo", enh.algo, "random_search or mc_control")
      ->check(CLI::IsMember({"random_search", "mc_control"}));
  c_enh->add_option("--eval-resolution", enh.eval_resolution, "Longest side used for reward evaluation")
      ->check(CLI::PositiveNumber);
  add_weight_flags(c_enh, enh.weights);
  c_enh->callback([&] { action = [&] { return cmd_enhance(enh); }; });

  MetricsArgs met;
  auto* c_met = app.add_subcommand("metrics", "Compare two images (ssim, msssim, reward)");
  c_met->add_option("a", met.a, "Reference / original PNG")->required();
  c_met->add_option("b", met.b, "Compared / enhanced PNG")->required();
  c_met->add_option("--which", met.which, "Metric(s) to print")
      ->check(CLI::IsMember({"ssim", "msssim", "reward"}));
  add_weight_flags(c_met, met.weights);
  c_met->callback([&] { action = [&] { return cmd_metrics(met); }; });

  MeshEvalArgs mev;
  auto* c_mesh = app.add_subcommand("mesh-eval", "Chamfer distance and F-score between two OBJ meshes");
  c_mesh->add_option("a", mev.a, "First OBJ")->required();
  c_mesh->add_option("b", mev.b, "Second OBJ")->required();
  c_mesh->add_option("--points", mev.points, "Samples per mesh")->check(CLI::PositiveNumber);
  c_mesh->add_option("--tau", mev.tau, "F-score distance threshold")->check(CLI::PositiveNumber);
  c_mesh->add_option("--seed", mev.seed, "Sampling seed for the first mesh (second uses seed+1)");
  c_mesh->add_flag("--seed-both", mev.seed_both, "Use the same seed for both meshes");
  c_mesh->add_flag("--normalize", mev.normalize, "Center and scale each mesh to unit box diagonal");
  c_mesh->callback([&] { action = [&] { return cmd_mesh_eval(mev); }; });

  StageArgs stg;
  auto* c_stage = app.add_subcommand("stage", "Run a single pipeline stage");
  c_stage->add_option("kind", stg.kind, "Stage kind")
      ->required()
      ->check(CLI::IsMember({"textgen", "enhance", "delight", "upscale", "bgremove", "recon3d", "passthrough"}));
  c_stage->add_option("--mode", stg.mode, "native or worker")->check(CLI::IsMember({"native", "worker"}));
  c_stage->add_option("--input", stg.input, "Input artifact");
  c_stage->add_option("--output", stg.output, "Output artifact")->required();
  c_stage->add_option("--params", stg.params, "Stage params as a JSON object");
  c_stage->add_option("--timeout", stg.timeout, "Worker timeout in seconds")->check(CLI::PositiveNumber);
  c_stage->add_option("--prompt", stg.prompt, "Prompt for textgen");
  c_stage->add_option("--seed", stg.seed, "Seed");
  c_stage->add_option("--budget", stg.budget, "Agent budget for enhance")->check(CLI::PositiveNumber);
  c_stage->add_option("--algo", stg.algo, "Agent algorithm for enhance")
      ->check(CLI::IsMember({"random_search", "mc_control"}));
  c_stage->add_option("command", stg.command, "Worker command line, given after --");
  c_stage->callback([&] { action = [&] { return cmd_stage(stg); }; });

  auto* c_pipe = app.add_subcommand("pipeline", "Run or verify configured pipelines");
  c_pipe->require_subcommand(1);
  PipelineArgs pipe;
  auto* c_run = c_pipe->add_subcommand("run", "Execute a pipeline config");
  c_run->add_option("config", pipe.config, "Pipeline config JSON")->required();
  auto* o_prompt = c_run->add_option("--prompt", pipe.prompt, "Text prompt (config starts with textgen)");
  auto* o_image = c_run->add_option("--image", pipe.image, "Input image (config without textgen)");
  o_prompt->excludes(o_image);
  c_run->add_option("--seed", pipe.seed, "Run seed (default: config seed, 42)");
  c_run->add_option("--out-dir", pipe.out_dir, "Output directory override");
  c_run->callback([&] { action = [&] { return cmd_pipeline_run(pipe); }; });

  std::string manifest_path;
  auto* c_verify = c_pipe->add_subcommand("verify", "Re-verify a run manifest and its checksums");
  c_verify->add_option("manifest", manifest_path, "manifest.json")->required();
  c_verify->callback([&] { action = [&] { return cmd_pipeline_verify(manifest_path); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const Error& e) {
    std::cerr << "genrecon: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "genrecon: " << e.what() << "\n";
    return kInvalidInput;
  }
}
