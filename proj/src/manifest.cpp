#include "genrecon/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>

#include "genrecon/checksum.hpp"

namespace genrecon {

namespace {

json artifact_json(const std::optional<ArtifactRecord>& a) {
  if (!a) return nullptr;
  return {{"path", a->path.string()}, {"sha256", a->sha256}};
}

void verify_artifact(const json& a, const std::string& where, std::vector<std::string>& problems) {
  if (a.is_null()) return;
  if (!a.is_object() || !a.contains("path") || !a.contains("sha256") || !a["path"].is_string() ||
      !a["sha256"].is_string()) {
    problems.push_back(where + ": malformed artifact record");
    return;
  }
  const std::filesystem::path p = a["path"].get<std::string>();
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) {
    problems.push_back(where + ": missing artifact " + p.string());
    return;
  }
  try {
    if (sha256_file(p) != a["sha256"].get<std::string>()) {
      problems.push_back(where + ": checksum mismatch for " + p.string());
    }
  } catch (const std::exception& e) {
    problems.push_back(where + ": " + e.what());
  }
}

}  // namespace

json StageRecord::to_json() const {
  json j;
  j["index"] = index;
  j["kind"] = std::string(to_string(kind));
  j["mode"] = std::string(to_string(mode));
  j["status"] = ok() ? "ok" : "failed";
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  j["input"] = artifact_json(input);
  j["output"] = artifact_json(output);
  j["output_info"] = output_info;
  j["record"] = record;
  if (!worker.is_null()) j["worker"] = worker;
  if (error) j["error"] = {{"code", error->code}, {"message", error->message}};
  return j;
}

bool RunManifest::ok() const {
  for (const StageRecord& s : stages) {
    if (!s.ok()) return false;
  }
  return config.contains("stages") && stages.size() == config["stages"].size();
}

json RunManifest::to_json() const {
  json j;
  j["tool_version"] = tool_version;
  j["seed"] = seed;
  j["status"] = ok() ? "ok" : "failed";
  j["input"] = input;
  j["config"] = config;
  json st = json::array();
  for (const StageRecord& s : stages) st.push_back(s.to_json());
  j["stages"] = st;
  return j;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const std::time_t secs = system_clock::to_time_t(now);
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::vector<std::string> verify_manifest(const json& m) {
  std::vector<std::string> problems;
  for (const char* key : {"tool_version", "seed", "status", "input", "config", "stages"}) {
    if (!m.contains(key)) problems.push_back(std::string("missing top-level key '") + key + "'");
  }
  if (!problems.empty()) return problems;
  const json& stages = m["stages"];
  const json& configured = m["config"].value("stages", json::array());
  if (!stages.is_array()) return {"'stages' is not an array"};
  if (stages.size() > configured.size()) problems.push_back("more stage records than configured stages");

  bool any_failed = false;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const json& s = stages[i];
    const std::string where = "stage " + std::to_string(i + 1);
    bool complete_record = true;
    for (const char* key : {"index", "kind", "mode", "status", "started_at", "finished_at", "input",
                            "output", "output_info", "record"}) {
      if (!s.contains(key)) {
        problems.push_back(where + ": missing key '" + key + "'");
        complete_record = false;
      }
    }
    if (!complete_record) continue;
    if (s["index"] != i + 1) problems.push_back(where + ": index out of order");
    if (i < configured.size() && s["kind"] != configured[i]["kind"]) {
      problems.push_back(where + ": kind differs from configured order");
    }
    const bool ok = s["status"] == "ok";
    if (!ok && s["status"] != "failed") problems.push_back(where + ": invalid status");
    if (any_failed) problems.push_back(where + ": recorded after a failed stage");
    if (!ok) {
      any_failed = true;
      if (!s.contains("error")) problems.push_back(where + ": failed stage lacks an error record");
    } else if (s["output"].is_null()) {
      problems.push_back(where + ": ok stage lacks an output artifact");
    }
    if (i > 0 && ok && stages[i - 1]["output"].is_object() && s["input"].is_object() &&
        s["input"]["path"] != stages[i - 1]["output"]["path"]) {
      problems.push_back(where + ": input is not the previous stage's output");
    }
    verify_artifact(s["input"], where + " input", problems);
    if (ok) verify_artifact(s["output"], where + " output", problems);
  }
  const bool complete = !any_failed && stages.size() == configured.size();
  if ((m["status"] == "ok") != complete) problems.push_back("top-level status disagrees with stages");
  if (m["input"].is_object() && m["input"].value("kind", "") == "image") {
    verify_artifact({{"path", m["input"].value("path", "")}, {"sha256", m["input"].value("sha256", "")}},
                    "run input", problems);
  }
  return problems;
}

std::vector<std::string> verify_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {path.string() + ": cannot read"};
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return {path.string() + ": invalid JSON"};
  return verify_manifest(j);
}

json strip_timestamps(json manifest) {
  if (manifest.contains("stages") && manifest["stages"].is_array()) {
    for (json& s : manifest["stages"]) {
      s.erase("started_at");
      s.erase("finished_at");
    }
  }
  return manifest;
}

}  // namespace genrecon
