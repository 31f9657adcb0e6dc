// Offline stand-in for the model workers. Speaks worker protocol v1 and can
// misbehave on demand so the pipeline's failure handling can be exercised.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <thread>

#include "genrecon/mesh.hpp"
#include "genrecon/png_io.hpp"
#include "genrecon/protocol.hpp"

namespace {

using namespace genrecon;

constexpr int kTextgenSize = 512;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Light gradient backdrop with a cluster of saturated shapes in the middle.
Image render_prompt(const std::string& prompt, std::uint64_t seed) {
  std::mt19937_64 rng(fnv1a(prompt) ^ (seed * 0x9e3779b97f4a7c15ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = kTextgenSize;
  Image img(n, n, 3);
  double top[3], bottom[3];
  for (int c = 0; c < 3; ++c) {
    top[c] = 0.75 + 0.2 * unit(rng);
    bottom[c] = 0.55 + 0.2 * unit(rng);
  }
  for (int y = 0; y < n; ++y) {
    const double t = static_cast<double>(y) / (n - 1);
    for (int x = 0; x < n; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(top[c] + t * (bottom[c] - top[c]));
    }
  }
  const int shapes = 3 + static_cast<int>(unit(rng) * 4);
  for (int s = 0; s < shapes; ++s) {
    const double cx = n * (0.35 + 0.3 * unit(rng));
    const double cy = n * (0.35 + 0.3 * unit(rng));
    const double r = n * (0.08 + 0.12 * unit(rng));
    const bool circle = unit(rng) < 0.5;
    double color[3];
    for (double& c : color) c = 0.1 + 0.8 * unit(rng);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        const bool inside = circle ? dx * dx + dy * dy <= r * r : std::abs(dx) <= r && std::abs(dy) <= r;
        if (!inside) continue;
        const double shade = 0.85 + 0.15 * std::sin(0.05 * (x + 2 * y));
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(std::clamp(color[c] * shade, 0.0, 1.0));
      }
    }
  }
  return img;
}

Image nearest_upscale(const Image& img, int factor) {
  Image out(img.width() * factor, img.height() * factor, img.channels());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(x / factor, y / factor, c);
    }
  }
  return out;
}

Image with_opaque_alpha(const Image& img) {
  Image out(img.width(), img.height(), 4, 1.0f);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

void produce(StageKind kind, const WorkerRequest& req) {
  const std::filesystem::path out = req.output_path;
  switch (kind) {
    case StageKind::textgen:
      save_png(render_prompt(req.params.value("prompt", ""), req.params.value("seed", std::uint64_t{0})), out);
      break;
    case StageKind::delight:
    case StageKind::passthrough:
      std::filesystem::copy_file(*req.input_path, out, std::filesystem::copy_options::overwrite_existing);
      break;
    case StageKind::upscale:
      save_png(nearest_upscale(load_png(*req.input_path), 4), out);
      break;
    case StageKind::bgremove:
      save_png(with_opaque_alpha(load_png(*req.input_path)), out);
      break;
    case StageKind::recon3d:
      save_obj(unit_cube(), out);
      break;
    case StageKind::enhance:
      std::filesystem::copy_file(*req.input_path, out, std::filesystem::copy_options::overwrite_existing);
      break;
  }
}

int respond(const WorkerResponse& r, int exit_code) {
  std::cout << r.to_line() << std::flush;
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock model worker (protocol v1)"};
  std::string kind_name;
  std::string misbehave = "none";
  app.add_option("--kind", kind_name, "Stage kind to serve")
      ->required()
      ->check(CLI::IsMember({"textgen", "enhance", "delight", "upscale", "bgremove", "recon3d", "passthrough"}));
  app.add_option("--misbehave", misbehave, "Failure mode to produce")
      ->check(CLI::IsMember({"none", "timeout", "invalid-json", "nonzero-exit", "missing-output",
                             "error-response", "no-response", "crash", "multi-line"}));
  CLI11_PARSE(app, argc, argv);
  const StageKind kind = *parse_stage_kind(kind_name);
  const json meta = {{"model", "mock-" + kind_name}};

  std::string line;
  std::getline(std::cin, line);

  if (misbehave == "timeout") {
    std::this_thread::sleep_for(std::chrono::hours(1));
    return 0;
  }
  if (misbehave == "crash") std::abort();
  if (misbehave == "no-response") return 0;
  if (misbehave == "invalid-json") {
    std::cout << "{this is not json\n" << std::flush;
    return 0;
  }

  WorkerRequest req;
  try {
    req = WorkerRequest::parse(line);
  } catch (const std::exception& e) {
    return respond(WorkerResponse::failure("bad_request", e.what(), meta), 1);
  }
  if (req.protocol_version != kProtocolVersion) {
    return respond(WorkerResponse::failure("version_mismatch",
                                           "unsupported protocol_version " + std::to_string(req.protocol_version),
                                           meta),
                   1);
  }
  if (req.stage != kind) {
    return respond(WorkerResponse::failure("kind_mismatch", "this worker serves " + kind_name, meta), 1);
  }
  if (req.stage != StageKind::textgen && !req.input_path) {
    return respond(WorkerResponse::failure("bad_request", "input_path is required", meta), 1);
  }
  if (misbehave == "error-response") {
    return respond(WorkerResponse::failure("mock_failure", "requested failure", meta), 1);
  }

  if (misbehave != "missing-output") {
    try {
      produce(kind, req);
    } catch (const std::exception& e) {
      return respond(WorkerResponse::failure("inference_failed", e.what(), meta), 1);
    }
  }
  const WorkerResponse ok = WorkerResponse::success(req.output_path, meta);
  if (misbehave == "multi-line") {
    std::cout << ok.to_line() << ok.to_line() << std::flush;
    return 0;
  }
  return respond(ok, misbehave == "nonzero-exit" ? 3 : 0);
}
