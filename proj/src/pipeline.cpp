#include "genrecon/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "genrecon/checksum.hpp"
#include "genrecon/json_io.hpp"
#include "genrecon/mesh.hpp"
#include "genrecon/native_stages.hpp"
#include "genrecon/png_io.hpp"
#include "genrecon/process.hpp"

namespace genrecon {

namespace {

namespace fs = std::filesystem;

struct StageFailed {
  StageFailure failure;
};

[[noreturn]] void fail(const char* code, std::string message) {
  throw StageFailed{{code, std::move(message)}};
}

json inspect_output(StageKind kind, const fs::path& path) {
  try {
    if (kind == StageKind::recon3d) {
      const Mesh m = load_obj(path);
      return {{"vertices", m.vertices.size()}, {"faces", m.faces.size()}};
    }
    const Image img = load_png(path);
    return {{"width", img.width()}, {"height", img.height()}, {"channels", img.channels()}};
  } catch (const Error& e) {
    fail(stage_error::invalid_output, e.what());
  }
}

json run_native(const StageConfig& stage, const fs::path& input, const StageContext& ctx) {
  try {
    switch (stage.kind) {
      case StageKind::enhance: {
        AgentConfig agent = ctx.agent;
        const EnhanceResult r = enhance(load_png(input), agent, ctx.weights);
        save_png(r.image, ctx.output_path);
        json rec = to_json(r.search);
        rec["seed"] = agent.seed;
        rec["budget"] = agent.budget;
        return rec;
      }
      case StageKind::upscale:
        save_png(native_upscale(load_png(input)), ctx.output_path);
        return {{"factor", kUpscaleFactor}, {"method", "bicubic"}};
      case StageKind::bgremove: {
        MatteSettings settings;
        settings.threshold = stage.params.value("threshold", settings.threshold);
        save_png(naive_matte(load_png(input), settings), ctx.output_path);
        return {{"method", "border_mode_matte"}, {"threshold", settings.threshold}};
      }
      case StageKind::passthrough:
        fs::copy_file(input, ctx.output_path, fs::copy_options::overwrite_existing);
        return json::object();
      default:
        fail(stage_error::native_failed,
             "stage '" + std::string(to_string(stage.kind)) + "' has no native implementation");
    }
  } catch (const Error& e) {
    fail(stage_error::native_failed, e.what());
  } catch (const fs::filesystem_error& e) {
    fail(stage_error::native_failed, e.what());
  }
}

std::string first_line(const std::string& text, bool& extra_lines) {
  const auto nl = text.find('\n');
  extra_lines = false;
  if (nl == std::string::npos) return text;
  for (std::size_t i = nl + 1; i < text.size(); ++i) {
    if (text[i] != '\n' && text[i] != '\r' && text[i] != ' ' && text[i] != '\t') {
      extra_lines = true;
      break;
    }
  }
  return text.substr(0, nl);
}

void run_worker(const StageConfig& stage, const std::optional<fs::path>& input,
                const StageContext& ctx, StageRecord& rec) {
  WorkerRequest req;
  req.stage = stage.kind;
  if (input) req.input_path = input->string();
  req.output_path = ctx.output_path.string();
  req.params = stage.params;
  if (stage.kind == StageKind::textgen) {
    req.params["prompt"] = ctx.prompt.value_or("");
    req.params["seed"] = ctx.seed;
  }

  const auto argv = resolve_worker_command(stage.command);
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(std::ceil(stage.timeout_s * 1000.0)));
  const ProcessResult proc = run_process(argv, req.to_line(), timeout);

  rec.worker = {{"command", stage.command}, {"exit_code", nullptr}, {"metadata", json::object()}};
  if (!proc.spawned) fail(stage_error::spawn_failed, proc.spawn_error);
  if (proc.timed_out) {
    fail(stage_error::timeout, "worker exceeded " + std::to_string(stage.timeout_s) + " s");
  }
  rec.worker["exit_code"] = proc.term_signal ? json(nullptr) : json(proc.exit_code);
  if (proc.term_signal) rec.worker["signal"] = proc.term_signal;

  bool extra_lines = false;
  const std::string line = first_line(proc.stdout_text, extra_lines);
  std::optional<WorkerResponse> resp;
  std::string parse_error;
  try {
    if (extra_lines) throw ProtocolError("worker response: more than one line on standard output");
    resp = WorkerResponse::parse(line);
    rec.worker["metadata"] = resp->metadata;
  } catch (const std::exception& e) {
    parse_error = e.what();
  }

  if (resp && resp->status == WorkerResponse::Status::error) {
    fail(stage_error::worker_error, resp->error_code + ": " + resp->message);
  }
  if (!proc.exited_ok()) {
    fail(stage_error::nonzero_exit,
         proc.term_signal ? "worker killed by signal " + std::to_string(proc.term_signal)
                          : "worker exited with status " + std::to_string(proc.exit_code));
  }
  if (!resp) fail(stage_error::malformed_response, parse_error);
  if (resp->output_path != req.output_path) {
    fail(stage_error::output_mismatch, "worker reported output " + resp->output_path.value_or("") +
                                           ", expected " + req.output_path);
  }
  std::error_code ec;
  if (!fs::is_regular_file(ctx.output_path, ec)) {
    fail(stage_error::missing_output, "worker reported ok but " + req.output_path + " does not exist");
  }
}

}  // namespace

StageRecord run_stage(const StageConfig& stage, const std::optional<fs::path>& input,
                      const StageContext& ctx) {
  StageRecord rec;
  rec.kind = stage.kind;
  rec.mode = stage.mode;
  rec.started_at = utc_timestamp();
  try {
    if (input) {
      try {
        rec.input = ArtifactRecord{*input, sha256_file(*input)};
      } catch (const Error& e) {
        fail(stage_error::checksum_failed, e.what());
      }
    } else if (stage.kind != StageKind::textgen) {
      fail(stage_error::native_failed, "stage '" + std::string(to_string(stage.kind)) + "' needs an input artifact");
    }
    std::error_code ec;
    fs::remove(ctx.output_path, ec);

    if (stage.mode == StageMode::native) {
      if (!input) fail(stage_error::native_failed, "native stages need an input artifact");
      rec.record = run_native(stage, *input, ctx);
    } else {
      run_worker(stage, input, ctx, rec);
    }

    try {
      rec.output = ArtifactRecord{ctx.output_path, sha256_file(ctx.output_path)};
    } catch (const Error& e) {
      fail(stage_error::checksum_failed, e.what());
    }
    rec.output_info = inspect_output(stage.kind, ctx.output_path);
  } catch (const StageFailed& f) {
    rec.error = f.failure;
    rec.output.reset();
  }
  rec.finished_at = utc_timestamp();
  return rec;
}

std::string artifact_name(std::size_t index, StageKind kind) {
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%02zu_", index);
  return prefix + std::string(to_string(kind)) + "." + std::string(artifact_extension(kind));
}

RunManifest run_pipeline(const PipelineConfig& cfg, const PipelineInput& input, std::uint64_t seed) {
  cfg.validate();
  if (input.prompt && input.image) {
    throw ConfigError(ConfigErrorKind::schema, "/", "give either a prompt or an input image, not both");
  }
  if (cfg.starts_from_prompt() && !input.prompt) {
    throw ConfigError(ConfigErrorKind::schema, "/stages/0", "pipeline starts with textgen and needs a prompt");
  }
  if (!cfg.starts_from_prompt() && !input.image) {
    throw ConfigError(ConfigErrorKind::schema, "/stages/0", "pipeline without textgen needs an input image");
  }

  RunManifest manifest;
  manifest.seed = seed;
  std::optional<fs::path> current;
  if (input.image) {
    const fs::path image = fs::absolute(*input.image).lexically_normal();
    load_png(image);
    manifest.input = {{"kind", "image"}, {"path", image.string()}, {"sha256", sha256_file(image)}};
    current = image;
  } else {
    manifest.input = {{"kind", "prompt"}, {"prompt", *input.prompt}};
  }

  const fs::path out_dir = fs::absolute(cfg.output_dir).lexically_normal();
  fs::create_directories(out_dir);
  PipelineConfig snapshot = cfg;
  snapshot.output_dir = out_dir;
  manifest.config = snapshot.to_json();

  StageContext ctx;
  ctx.seed = seed;
  ctx.agent = cfg.agent;
  ctx.agent.seed = cfg.agent_seed.value_or(seed);
  ctx.weights = cfg.reward_weights;
  ctx.prompt = input.prompt;

  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    const StageConfig& stage = cfg.stages[i];
    ctx.output_path = out_dir / artifact_name(i + 1, stage.kind);
    StageRecord rec = run_stage(stage, current, ctx);
    rec.index = i + 1;
    std::clog << "[genrecon] stage " << rec.index << " " << to_string(stage.kind) << " ("
              << to_string(stage.mode) << "): "
              << (rec.ok() ? "ok" : rec.error->code + ": " + rec.error->message) << "\n";
    const bool ok = rec.ok();
    manifest.stages.push_back(std::move(rec));
    if (!ok) break;
    current = ctx.output_path;
  }

  manifest.path = out_dir / kManifestName;
  std::ofstream out(manifest.path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, manifest.path.string() + ": cannot write manifest");
  out << manifest.to_json().dump(2) << "\n";
  out.close();
  if (!out) throw Error(ErrorCode::io_error, manifest.path.string() + ": manifest write failed");
  return manifest;
}

}  // namespace genrecon
