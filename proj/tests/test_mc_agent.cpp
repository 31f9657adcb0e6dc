#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "genrecon/agent.hpp"
#include "genrecon/enhance.hpp"
#include "genrecon/error.hpp"
#include "genrecon/reward.hpp"
#include "test_support.hpp"

using namespace genrecon;
using testing::gray_image;

namespace {

double hash01(int x, int y, int salt) {
  const double s = std::sin(12.9898 * x + 78.233 * y + 37.719 * salt) * 43758.5453;
  return s - std::floor(s);
}

// Already exposed at the target with maximal two-level contrast: every pointwise
// grid move either leaves a 0/1 image unchanged or lowers contrast.
Image binary_fixture(int w, int h) {
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float v = hash01(x, y, 1) < 0.6 ? 1.0f : 0.0f;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  }
  return img;
}

Image low_contrast_fixture(int w, int h) {
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = 0.45 + 0.05 * std::sin(0.3 * x) * std::cos(0.2 * y);
      img.at(x, y, 0) = static_cast<float>(v);
      img.at(x, y, 1) = static_cast<float>(v * 0.95);
      img.at(x, y, 2) = static_cast<float>(v * 1.05);
    }
  }
  return img;
}

Image desaturated_fixture(int w, int h) {
  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double g = 0.35 + 0.25 * hash01(x / 8, y / 8, 2);
      img.at(x, y, 0) = static_cast<float>(g + 0.04);
      img.at(x, y, 1) = static_cast<float>(g);
      img.at(x, y, 2) = static_cast<float>(g - 0.03);
    }
  }
  return img;
}

struct GridOptimum {
  LevelIndices levels{};
  double total = -1e300;
};

// Exhaustive search over every vector of the action space.
GridOptimum exhaustive(const Image& img, const ActionSpace& space, const RewardWeights& w) {
  const RewardEvaluator eval(img, w);
  GridOptimum best;
  LevelIndices idx{};
  const std::size_t n = space.vector_count();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t rem = k;
    for (std::size_t s = 0; s < kSlotCount; ++s) {
      idx[s] = rem % space.levels[s].size();
      rem /= space.levels[s].size();
    }
    const double t = eval(apply_params(img, space.compose(idx))).total;
    if (t > best.total) best = {idx, t};
  }
  return best;
}

AgentConfig config(SearchAlgorithm algo, int budget, std::uint64_t seed) {
  AgentConfig cfg;
  cfg.algorithm = algo;
  cfg.budget = budget;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("action spaces") {
  const ActionSpace std_space = ActionSpace::standard();
  CHECK_NOTHROW(std_space.validate());
  CHECK(std_space.compose(std_space.identity()) == EnhanceParams::identity());
  CHECK(std_space.vector_count() == 7u * 6 * 6 * 7 * 5 * 4);
  const ActionSpace red = ActionSpace::reduced();
  CHECK_NOTHROW(red.validate());
  CHECK(red.vector_count() == 729);
  CHECK(red.compose(red.identity()) == EnhanceParams::identity());

  ActionSpace broken = red;
  broken.levels[static_cast<std::size_t>(Slot::gamma)] = {0.8, 1.2};
  CHECK_THROWS_AS(broken.validate(), Error);
  broken = red;
  broken.levels[static_cast<std::size_t>(Slot::brightness)] = {0.0, -0.1};
  CHECK_THROWS_AS(broken.validate(), Error);
  broken = red;
  broken.levels[static_cast<std::size_t>(Slot::contrast)] = {0.2, 1.0};
  CHECK_THROWS_AS(broken.validate(), Error);

  CHECK(slot_name(0) == "curve_strength");
  CHECK(slot_name(5) == "smoothness");
  CHECK(parse_algorithm("mc_control") == SearchAlgorithm::mc_control);
  CHECK_FALSE(parse_algorithm("bogus").has_value());
}

TEST_CASE("epsilon schedule") {
  AgentConfig cfg;
  cfg.budget = 100;
  CHECK(cfg.epsilon(0) == doctest::Approx(0.9));
  CHECK(cfg.epsilon(50) == doctest::Approx(0.45));
  CHECK(cfg.epsilon(99) == doctest::Approx(0.05));
  CHECK(cfg.epsilon(100) == 0.05);
  for (int t = 1; t < 100; ++t) CHECK(cfg.epsilon(t) <= cfg.epsilon(t - 1));
  cfg.fixed_epsilon = 0.0;
  CHECK(cfg.epsilon(0) == 0.0);
  cfg.fixed_epsilon = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("qtable bookkeeping") {
  QTable q(ActionSpace::reduced());
  CHECK(q.actions(0) == 3);
  CHECK(q.greedy(0) == 0);
  q.credit(0, 2, 1.0);
  q.credit(0, 2, 2.0);
  q.credit(0, 2, 6.0);
  CHECK(q.cell(0, 2).visits == 3);
  CHECK(q.cell(0, 2).mean_return == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(q.greedy(0) == 2);
  q.credit(0, 1, 3.0);
  CHECK(q.greedy(0) == 1);  // tie at 3.0 goes to the lower index
  q.credit(1, 0, -1.0);
  CHECK(q.greedy(1) == 1);
  CHECK(q.visits(0) == 4);
  CHECK(q.visits(1) == 1);
  CHECK_THROWS(q.credit(0, 3, 1.0));
}

TEST_CASE("working copy") {
  const Image big = gray_image(512, 300, 0.5f);
  const Image w = working_copy(big, 256);
  CHECK(w.width() == 256);
  CHECK(w.height() == 150);
  CHECK(working_copy(gray_image(100, 80, 0.5f), 256) == gray_image(100, 80, 0.5f));
  const Image thin = working_copy(gray_image(1000, 20, 0.5f), 256);
  CHECK(thin.width() == 256);
  CHECK(thin.height() == 16);
}

TEST_CASE("budget boundaries") {
  const Image img = gray_image(32, 32, 0.15f);
  const RewardWeights w;
  for (auto algo : {SearchAlgorithm::random_search, SearchAlgorithm::mc_control}) {
    CHECK_THROWS_AS(enhance(img, config(algo, 0, 1), w), Error);
    CHECK_THROWS_AS(enhance(img, config(algo, -5, 1), w), Error);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SearchResult r = random_search(img, config(SearchAlgorithm::random_search, 1, seed), w);
    CHECK(r.evaluations == 2);
    CHECK(r.reward.total >= r.identity_reward.total);
    const double recomputed = reward(img, apply_params(img, r.params), w).total;
    CHECK(recomputed == r.reward.total);
  }
}

TEST_CASE("searches are deterministic under a seed") {
  std::mt19937_64 rng(5);
  const Image img = testing::random_smooth_image(rng, 48, 40);
  const RewardWeights w;
  for (auto algo : {SearchAlgorithm::random_search, SearchAlgorithm::mc_control}) {
    const auto a = enhance(img, config(algo, 60, 9), w);
    const auto b = enhance(img, config(algo, 60, 9), w);
    CHECK(a.search.params == b.search.params);
    CHECK(a.search.levels == b.search.levels);
    CHECK(a.search.reward.total == b.search.reward.total);
    CHECK(a.image == b.image);
    if (algo == SearchAlgorithm::mc_control) {
      REQUIRE(a.search.qtable);
      CHECK(*a.search.qtable == *b.search.qtable);
    }
  }
}

TEST_CASE("returned reward matches the returned parameters") {
  std::mt19937_64 rng(6);
  const RewardWeights w;
  for (int i = 0; i < 6; ++i) {
    const Image img = testing::random_smooth_image(rng, 40, 40);
    for (auto algo : {SearchAlgorithm::random_search, SearchAlgorithm::mc_control}) {
      const auto r = enhance(img, config(algo, 40, static_cast<std::uint64_t>(i)), w);
      CHECK(r.search.reward.total >= r.search.identity_reward.total);
      CHECK(reward(img, r.image, w).total == r.search.reward.total);
      CHECK(r.search.params == ActionSpace::standard().compose(r.search.levels));
      CHECK(r.image == apply_params(img, r.search.params));
    }
  }
}

TEST_CASE("dark fixture is brightened") {
  const Image dark = gray_image(64, 64, 0.15f);
  const RewardWeights w;

  AgentConfig reduced = config(SearchAlgorithm::random_search, 200, 42);
  reduced.space = ActionSpace::reduced();
  const GridOptimum opt = exhaustive(dark, reduced.space, w);
  CHECK(mean_luma(apply_params(dark, reduced.space.compose(opt.levels))) > mean_luma(dark));
  CHECK(opt.total > reward(dark, dark, w).total);

  for (auto algo : {SearchAlgorithm::random_search, SearchAlgorithm::mc_control}) {
    const auto r = enhance(dark, config(algo, 200, 42), w);
    CHECK(r.search.reward.total > r.search.identity_reward.total);
    CHECK(mean_luma(r.image) > mean_luma(dark));
  }
}

TEST_CASE("random search approaches the exhaustive optimum on the reduced grid") {
  const RewardWeights w;
  const Image fixtures[] = {gray_image(48, 48, 0.15f), low_contrast_fixture(48, 48), desaturated_fixture(48, 48),
                            binary_fixture(48, 48)};
  for (const Image& img : fixtures) {
    AgentConfig cfg = config(SearchAlgorithm::random_search, 2000, 7);
    cfg.space = ActionSpace::reduced();
    const GridOptimum opt = exhaustive(img, cfg.space, w);
    const SearchResult r = random_search(img, cfg, w);
    CHECK(r.reward.total <= opt.total);
    CHECK(opt.total - r.reward.total <= 0.01 * std::abs(opt.total));
  }
}

TEST_CASE("identity wins on the binary fixture") {
  const Image img = binary_fixture(32, 32);
  const RewardWeights w;
  const ActionSpace space = ActionSpace::standard();
  const GridOptimum opt = exhaustive(img, space, w);
  const double id_total = reward(img, img, w).total;
  CHECK(opt.total == id_total);
  for (auto algo : {SearchAlgorithm::random_search, SearchAlgorithm::mc_control}) {
    const auto r = enhance(img, config(algo, 200, 3), w);
    CHECK(r.search.params == EnhanceParams::identity());
    CHECK(r.image == img);
  }
}

TEST_CASE("mc control bookkeeping") {
  std::mt19937_64 rng(8);
  const Image img = testing::random_smooth_image(rng, 32, 32);
  const RewardWeights w;
  const SearchResult r = mc_control(img, config(SearchAlgorithm::mc_control, 75, 4), w);
  REQUIRE(r.qtable);
  CHECK(r.episodes.size() == 75);
  CHECK(r.evaluations == 77);  // identity, K episodes, final greedy vector
  for (std::size_t s = 0; s < kSlotCount; ++s) {
    CHECK(r.qtable->visits(s) == 75);
    // Each cell's mean equals the arithmetic mean of the episodes that chose it.
    for (std::size_t a = 0; a < r.qtable->actions(s); ++a) {
      double sum = 0.0;
      std::uint64_t n = 0;
      for (const Episode& e : r.episodes) {
        if (e.levels[s] == a) {
          sum += e.reward;
          ++n;
        }
      }
      CHECK(r.qtable->cell(s, a).visits == n);
      if (n > 0) CHECK(r.qtable->cell(s, a).mean_return == doctest::Approx(sum / n).epsilon(1e-12));
    }
  }
  double best_episode = -1e300;
  for (const Episode& e : r.episodes) best_episode = std::max(best_episode, e.reward);
  CHECK(r.reward.total >= std::min(best_episode, r.identity_reward.total));
  CHECK(r.reward.total >= r.identity_reward.total);
}

TEST_CASE("zero epsilon degenerates to greedy play") {
  const Image img = gray_image(32, 32, 0.15f);
  const RewardWeights w;
  AgentConfig cfg = config(SearchAlgorithm::mc_control, 30, 1);
  cfg.fixed_epsilon = 0.0;
  const SearchResult a = mc_control(img, cfg, w);
  cfg.seed = 999;
  const SearchResult b = mc_control(img, cfg, w);
  // No exploration draws, so the seed is irrelevant.
  REQUIRE(a.episodes.size() == 30);
  CHECK(a.episodes.front().levels == LevelIndices{});
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].levels == b.episodes[i].levels);
    CHECK(a.episodes[i].reward == b.episodes[i].reward);
  }
  CHECK(*a.qtable == *b.qtable);
}

TEST_CASE("mc control against random search with a smaller budget") {
  const Image dark = gray_image(64, 64, 0.15f);
  const RewardWeights w;
  int wins = 0;
  constexpr int kTrials = 20;
  for (int seed = 0; seed < kTrials; ++seed) {
    const auto mc = mc_control(dark, config(SearchAlgorithm::mc_control, 200, static_cast<std::uint64_t>(seed)), w);
    const auto rs = random_search(dark, config(SearchAlgorithm::random_search, 50, static_cast<std::uint64_t>(seed)), w);
    if (mc.reward.total >= rs.reward.total) ++wins;
  }
  // Measured rate with these seeds: 16/20.
  std::printf("mc_control(K=200) >= random_search(K=50): %d/%d seeds\n", wins, kTrials);
  CHECK(wins >= 16);
}

TEST_CASE("random search budget of 200 on a 256x256 image is fast") {
  std::mt19937_64 rng(9);
  const Image img = testing::random_smooth_image(rng, 256, 256);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = random_search(img, config(SearchAlgorithm::random_search, 200, 1), RewardWeights{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.evaluations == 201);
  CHECK(secs < 10.0);
}
