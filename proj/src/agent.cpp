#include "genrecon/agent.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "genrecon/error.hpp"

namespace genrecon {

namespace {

double identity_value(std::size_t slot) {
  const EnhanceParams id = EnhanceParams::identity();
  switch (static_cast<Slot>(slot)) {
    case Slot::curve: return id.curve_strength;
    case Slot::brightness: return id.brightness;
    case Slot::contrast: return id.contrast;
    case Slot::gamma: return id.gamma;
    case Slot::saturation: return id.saturation;
    case Slot::smoothness: return id.smoothness;
  }
  return 0.0;
}

// Shared state of one search run: the working copy and its evaluator.
class SearchContext {
 public:
  SearchContext(const Image& img, const AgentConfig& cfg, const RewardWeights& w)
      : cfg_(cfg), work_(working_copy(img, cfg.eval_resolution)), evaluate_(work_, w) {}

  RewardBreakdown score(const LevelIndices& idx) {
    ++evaluations_;
    return evaluate_(apply_params(work_, cfg_.space.compose(idx)));
  }

  SearchResult finish(const LevelIndices& best, const RewardBreakdown& best_reward,
                      const RewardBreakdown& identity_reward) const {
    SearchResult r;
    r.levels = best;
    r.params = cfg_.space.compose(best);
    r.reward = best_reward;
    r.identity_reward = identity_reward;
    r.evaluations = evaluations_;
    r.eval_width = work_.width();
    r.eval_height = work_.height();
    r.algorithm = cfg_.algorithm;
    return r;
  }

 private:
  const AgentConfig& cfg_;
  Image work_;
  RewardEvaluator evaluate_;
  std::size_t evaluations_ = 0;
};

}  // namespace

std::string_view slot_name(std::size_t slot) {
  static constexpr std::string_view kNames[kSlotCount] = {
      "curve_strength", "brightness", "contrast", "gamma", "saturation", "smoothness"};
  return slot < kSlotCount ? kNames[slot] : "unknown";
}

ActionSpace ActionSpace::standard() {
  ActionSpace s;
  s.levels[static_cast<std::size_t>(Slot::curve)] = {-0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8};
  s.levels[static_cast<std::size_t>(Slot::brightness)] = {-0.2, -0.1, 0.0, 0.1, 0.2, 0.3};
  s.levels[static_cast<std::size_t>(Slot::contrast)] = {0.8, 0.9, 1.0, 1.1, 1.25, 1.5};
  s.levels[static_cast<std::size_t>(Slot::gamma)] = {0.5, 0.67, 0.8, 1.0, 1.25, 1.5, 2.0};
  s.levels[static_cast<std::size_t>(Slot::saturation)] = {0.6, 0.8, 1.0, 1.2, 1.5};
  s.levels[static_cast<std::size_t>(Slot::smoothness)] = {0.0, 0.15, 0.3, 0.5};
  return s;
}

ActionSpace ActionSpace::reduced() {
  ActionSpace s;
  s.levels[static_cast<std::size_t>(Slot::curve)] = {-0.2, 0.0, 0.6};
  s.levels[static_cast<std::size_t>(Slot::brightness)] = {-0.1, 0.0, 0.2};
  s.levels[static_cast<std::size_t>(Slot::contrast)] = {0.9, 1.0, 1.25};
  s.levels[static_cast<std::size_t>(Slot::gamma)] = {0.67, 1.0, 1.5};
  s.levels[static_cast<std::size_t>(Slot::saturation)] = {0.8, 1.0, 1.2};
  s.levels[static_cast<std::size_t>(Slot::smoothness)] = {0.0, 0.15, 0.3};
  return s;
}

void ActionSpace::validate() const {
  for (std::size_t s = 0; s < kSlotCount; ++s) {
    const auto& g = levels[s];
    if (g.empty()) throw_invalid(std::string(slot_name(s)) + " grid is empty");
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (!(g[i] > g[i - 1])) {
        throw_invalid(std::string(slot_name(s)) + " grid is not strictly increasing");
      }
    }
    identity_index(s);
  }
  LevelIndices lo{};
  LevelIndices hi{};
  for (std::size_t s = 0; s < kSlotCount; ++s) hi[s] = levels[s].size() - 1;
  compose(lo).validate();
  compose(hi).validate();
}

std::size_t ActionSpace::identity_index(std::size_t slot) const {
  const auto& g = levels[slot];
  const auto it = std::find(g.begin(), g.end(), identity_value(slot));
  if (it == g.end()) {
    throw_invalid(std::string(slot_name(slot)) + " grid lacks its identity level");
  }
  return static_cast<std::size_t>(it - g.begin());
}

LevelIndices ActionSpace::identity() const {
  LevelIndices idx{};
  for (std::size_t s = 0; s < kSlotCount; ++s) idx[s] = identity_index(s);
  return idx;
}

EnhanceParams ActionSpace::compose(const LevelIndices& idx) const {
  auto level = [&](Slot s) { return levels[static_cast<std::size_t>(s)].at(idx[static_cast<std::size_t>(s)]); };
  EnhanceParams p;
  p.curve_strength = level(Slot::curve);
  p.brightness = level(Slot::brightness);
  p.contrast = level(Slot::contrast);
  p.gamma = level(Slot::gamma);
  p.saturation = level(Slot::saturation);
  p.smoothness = level(Slot::smoothness);
  return p;
}

std::size_t ActionSpace::vector_count() const {
  std::size_t n = 1;
  for (const auto& g : levels) n *= g.size();
  return n;
}

std::string_view to_string(SearchAlgorithm a) {
  return a == SearchAlgorithm::mc_control ? "mc_control" : "random_search";
}

std::optional<SearchAlgorithm> parse_algorithm(std::string_view name) {
  if (name == "random_search") return SearchAlgorithm::random_search;
  if (name == "mc_control") return SearchAlgorithm::mc_control;
  return std::nullopt;
}

void AgentConfig::validate() const {
  if (budget < 1) throw_invalid("agent budget must be >= 1");
  if (eval_resolution < 1) throw_invalid("eval_resolution must be >= 1");
  if (fixed_epsilon && !(*fixed_epsilon >= 0.0 && *fixed_epsilon <= 1.0)) {
    throw_invalid("epsilon must lie in [0,1]");
  }
  space.validate();
}

double AgentConfig::epsilon(int episode) const {
  if (fixed_epsilon) return *fixed_epsilon;
  const double decayed = 0.9 * (1.0 - static_cast<double>(episode) / budget);
  return std::max(0.05, decayed);
}

QTable::QTable(const ActionSpace& space) {
  for (std::size_t s = 0; s < kSlotCount; ++s) cells_[s].resize(space.levels[s].size());
}

void QTable::credit(std::size_t slot, std::size_t action, double ret) {
  Cell& c = cells_[slot].at(action);
  ++c.visits;
  c.mean_return += (ret - c.mean_return) / static_cast<double>(c.visits);
}

std::size_t QTable::greedy(std::size_t slot) const {
  const auto& row = cells_[slot];
  std::size_t best = 0;
  for (std::size_t a = 1; a < row.size(); ++a) {
    if (row[a].mean_return > row[best].mean_return) best = a;
  }
  return best;
}

const QTable::Cell& QTable::cell(std::size_t slot, std::size_t action) const {
  return cells_[slot].at(action);
}

std::uint64_t QTable::visits(std::size_t slot) const {
  std::uint64_t n = 0;
  for (const Cell& c : cells_[slot]) n += c.visits;
  return n;
}

Image working_copy(const Image& img, int eval_resolution) {
  const int longest = std::max(img.width(), img.height());
  if (longest <= eval_resolution) return img;
  const double scale = static_cast<double>(eval_resolution) / longest;
  auto target = [&](int side) {
    const int scaled = std::max(1, static_cast<int>(std::lround(side * scale)));
    return std::min(side, std::max(scaled, kExposurePatch));
  };
  return resize_bicubic(img, target(img.width()), target(img.height()));
}

SearchResult random_search(const Image& img, const AgentConfig& cfg, const RewardWeights& w) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::vector<LevelIndices> samples(static_cast<std::size_t>(cfg.budget));
  for (auto& idx : samples) {
    for (std::size_t s = 0; s < kSlotCount; ++s) {
      std::uniform_int_distribution<std::size_t> pick(0, cfg.space.levels[s].size() - 1);
      idx[s] = pick(rng);
    }
  }

  SearchContext ctx(img, cfg, w);
  const LevelIndices identity = cfg.space.identity();
  const RewardBreakdown identity_reward = ctx.score(identity);
  LevelIndices best = identity;
  RewardBreakdown best_reward = identity_reward;
  for (const auto& idx : samples) {
    const RewardBreakdown r = ctx.score(idx);
    if (r.total > best_reward.total) {
      best = idx;
      best_reward = r;
    }
  }
  return ctx.finish(best, best_reward, identity_reward);
}

SearchResult mc_control(const Image& img, const AgentConfig& cfg, const RewardWeights& w) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  SearchContext ctx(img, cfg, w);
  QTable q(cfg.space);

  const LevelIndices identity = cfg.space.identity();
  const RewardBreakdown identity_reward = ctx.score(identity);

  std::vector<Episode> episodes;
  episodes.reserve(static_cast<std::size_t>(cfg.budget));
  std::optional<std::pair<LevelIndices, RewardBreakdown>> best_episode;
  for (int t = 0; t < cfg.budget; ++t) {
    const double eps = cfg.epsilon(t);
    LevelIndices idx{};
    for (std::size_t s = 0; s < kSlotCount; ++s) {
      if (coin(rng) < eps) {
        std::uniform_int_distribution<std::size_t> pick(0, cfg.space.levels[s].size() - 1);
        idx[s] = pick(rng);
      } else {
        idx[s] = q.greedy(s);
      }
    }
    const RewardBreakdown r = ctx.score(idx);
    // Undiscounted terminal return; every slot is visited exactly once, so
    // each (slot, action) pair of the episode is a first visit.
    for (std::size_t s = 0; s < kSlotCount; ++s) q.credit(s, idx[s], r.total);
    episodes.push_back({idx, r.total});
    if (!best_episode || r.total > best_episode->second.total) best_episode.emplace(idx, r);
  }

  LevelIndices greedy{};
  for (std::size_t s = 0; s < kSlotCount; ++s) greedy[s] = q.greedy(s);
  LevelIndices chosen = greedy;
  RewardBreakdown chosen_reward = ctx.score(greedy);
  if (best_episode && best_episode->second.total > chosen_reward.total) {
    chosen = best_episode->first;
    chosen_reward = best_episode->second;
  }
  if (identity_reward.total >= chosen_reward.total) {
    chosen = identity;
    chosen_reward = identity_reward;
  }

  SearchResult result = ctx.finish(chosen, chosen_reward, identity_reward);
  result.qtable = std::move(q);
  result.episodes = std::move(episodes);
  return result;
}

EnhanceResult enhance(const Image& img, const AgentConfig& cfg, const RewardWeights& w) {
  SearchResult search = cfg.algorithm == SearchAlgorithm::mc_control ? mc_control(img, cfg, w)
                                                                      : random_search(img, cfg, w);
  Image out = search.params == EnhanceParams::identity() ? img : apply_params(img, search.params);
  return {std::move(out), std::move(search)};
}

}  // namespace genrecon
