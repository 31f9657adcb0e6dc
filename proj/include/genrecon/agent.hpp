#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "genrecon/enhance.hpp"
#include "genrecon/image.hpp"
#include "genrecon/reward.hpp"

namespace genrecon {

// Attribute slots in canonical operator order.
enum class Slot : std::size_t { curve, brightness, contrast, gamma, saturation, smoothness };
inline constexpr std::size_t kSlotCount = 6;

std::string_view slot_name(std::size_t slot);

using LevelIndices = std::array<std::size_t, kSlotCount>;

/// Ordered candidate levels per slot. Every grid is strictly increasing and
/// contains its attribute's identity value.
struct ActionSpace {
  std::array<std::vector<double>, kSlotCount> levels;

  static ActionSpace standard();
  /// Three levels per slot (729 vectors), small enough for exhaustive search.
  static ActionSpace reduced();

  void validate() const;
  std::size_t identity_index(std::size_t slot) const;
  LevelIndices identity() const;
  EnhanceParams compose(const LevelIndices& idx) const;
  std::size_t vector_count() const;
};

enum class SearchAlgorithm { random_search, mc_control };
std::string_view to_string(SearchAlgorithm a);
std::optional<SearchAlgorithm> parse_algorithm(std::string_view name);

struct AgentConfig {
  int budget = 200;
  std::uint64_t seed = 42;
  SearchAlgorithm algorithm = SearchAlgorithm::random_search;
  int eval_resolution = 256;
  /// Overrides the linear decay schedule when set.
  std::optional<double> fixed_epsilon;
  ActionSpace space = ActionSpace::standard();

  void validate() const;
  /// max(0.05, 0.9 (1 - t/K)) unless fixed_epsilon is set.
  double epsilon(int episode) const;
};

/// First-visit Monte Carlo action values, one row of cells per slot.
class QTable {
 public:
  struct Cell {
    std::uint64_t visits = 0;
    double mean_return = 0.0;
    bool operator==(const Cell&) const = default;
  };

  QTable() = default;
  explicit QTable(const ActionSpace& space);

  void credit(std::size_t slot, std::size_t action, double ret);
  /// Highest mean return; lowest index wins ties.
  std::size_t greedy(std::size_t slot) const;
  const Cell& cell(std::size_t slot, std::size_t action) const;
  std::size_t actions(std::size_t slot) const { return cells_[slot].size(); }
  std::uint64_t visits(std::size_t slot) const;

  bool operator==(const QTable&) const = default;

 private:
  std::array<std::vector<Cell>, kSlotCount> cells_;
};

struct Episode {
  LevelIndices levels{};
  double reward = 0.0;
};

struct SearchResult {
  EnhanceParams params;
  LevelIndices levels{};
  RewardBreakdown reward;
  RewardBreakdown identity_reward;
  std::size_t evaluations = 0;
  int eval_width = 0;
  int eval_height = 0;
  SearchAlgorithm algorithm = SearchAlgorithm::random_search;
  std::optional<QTable> qtable;
  std::vector<Episode> episodes;
};

struct EnhanceResult {
  Image image;
  SearchResult search;
};

/// Downscaled copy whose longest side is eval_resolution (never upscaled,
/// short side kept at least one exposure patch when possible).
Image working_copy(const Image& img, int eval_resolution);

/// Identity vector plus `budget` uniformly sampled grid vectors; argmax with
/// earliest-evaluated tie-breaking.
SearchResult random_search(const Image& img, const AgentConfig& cfg, const RewardWeights& w);

/// Episodic first-visit Monte Carlo control with an epsilon-greedy policy.
SearchResult mc_control(const Image& img, const AgentConfig& cfg, const RewardWeights& w);

/// Searches at the working resolution and applies the winner at full size.
EnhanceResult enhance(const Image& img, const AgentConfig& cfg, const RewardWeights& w);

}  // namespace genrecon
