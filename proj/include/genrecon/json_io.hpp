#pragma once

#include "genrecon/agent.hpp"
#include "genrecon/mesh.hpp"
#include "genrecon/protocol.hpp"
#include "genrecon/reward.hpp"

namespace genrecon {

json to_json(const EnhanceParams& p);
json to_json(const RewardBreakdown& r);
json to_json(const RewardWeights& w);
json to_json(const EvalReport& r);
/// Params, reward, identity reward, chosen grid levels and search settings.
json to_json(const SearchResult& r);

EnhanceParams enhance_params_from_json(const json& j);
RewardBreakdown reward_breakdown_from_json(const json& j);

}  // namespace genrecon
