#include "genrecon/json_io.hpp"

namespace genrecon {

json to_json(const EnhanceParams& p) {
  return {{"brightness", p.brightness}, {"contrast", p.contrast},
          {"gamma", p.gamma},           {"saturation", p.saturation},
          {"smoothness", p.smoothness}, {"curve_strength", p.curve_strength}};
}

json to_json(const RewardBreakdown& r) {
  return {{"exposure_loss", r.exposure_loss},       {"spatial_loss", r.spatial_loss},
          {"contrast_score", r.contrast_score},     {"colorfulness", r.colorfulness},
          {"ssim_to_original", r.ssim_to_original}, {"penalty", r.penalty},
          {"total", r.total}};
}

json to_json(const RewardWeights& w) {
  return {{"exposure", w.exposure},
          {"spatial", w.spatial},
          {"contrast", w.contrast},
          {"colorfulness", w.colorfulness},
          {"exposure_target", w.exposure_target},
          {"ssim_floor", w.ssim_floor},
          {"ssim_penalty", w.ssim_penalty}};
}

json to_json(const EvalReport& r) {
  return {{"chamfer", r.chamfer},     {"precision", r.precision}, {"recall", r.recall},
          {"fscore", r.fscore},       {"tau", r.tau},             {"n_points", r.n_points},
          {"seed", r.seed},           {"seed_b", r.seed_b},       {"normalized", r.normalized}};
}

json to_json(const SearchResult& r) {
  json levels = json::object();
  for (std::size_t s = 0; s < kSlotCount; ++s) levels[std::string(slot_name(s))] = r.levels[s];
  return {{"params", to_json(r.params)},
          {"reward", to_json(r.reward)},
          {"identity_reward", to_json(r.identity_reward)},
          {"levels", levels},
          {"algorithm", std::string(to_string(r.algorithm))},
          {"evaluations", r.evaluations},
          {"eval_width", r.eval_width},
          {"eval_height", r.eval_height}};
}

EnhanceParams enhance_params_from_json(const json& j) {
  EnhanceParams p;
  p.brightness = j.at("brightness").get<double>();
  p.contrast = j.at("contrast").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.saturation = j.at("saturation").get<double>();
  p.smoothness = j.at("smoothness").get<double>();
  p.curve_strength = j.at("curve_strength").get<double>();
  return p;
}

RewardBreakdown reward_breakdown_from_json(const json& j) {
  RewardBreakdown r;
  r.exposure_loss = j.at("exposure_loss").get<double>();
  r.spatial_loss = j.at("spatial_loss").get<double>();
  r.contrast_score = j.at("contrast_score").get<double>();
  r.colorfulness = j.at("colorfulness").get<double>();
  r.ssim_to_original = j.at("ssim_to_original").get<double>();
  r.penalty = j.at("penalty").get<double>();
  r.total = j.at("total").get<double>();
  return r;
}

}  // namespace genrecon
