#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fedsel/agents/hybrid_agent.hpp"
#include "fedsel/env/environment.hpp"
#include "fedsel/env/episode.hpp"

namespace fedsel::agents {

/// One independent learner per service, with payment bounds
/// [min grid bid, budget] and per-agent seeded streams.
std::vector<HybridAgent> make_agents(const env::MarketConfig& market, const AgentConfig& config,
                                     std::uint64_t seed);

struct TrainCallbacks {
  std::function<void(int episode, const std::vector<env::ServiceEpisodeSummary>&)> on_episode;
  std::function<void(int episode, int slot, int service, const UpdateStats&)> on_update;
  std::function<void(int episode, const env::StepResult&)> on_step;
};

struct TrainResult {
  // [service][episode] undiscounted episode reward.
  std::vector<std::vector<double>> episode_rewards;
  // [episode][service]
  std::vector<std::vector<env::ServiceEpisodeSummary>> summaries;
};

/// Runs `episodes` episodes, updating every active agent once per slot
/// after the environment steps. Episode e resets the environment with
/// derive_seed(seed, kEnvironment, e).
TrainResult train(env::Environment& environment, std::vector<HybridAgent>& agents, int episodes,
                  std::uint64_t seed, const TrainCallbacks& callbacks = {});

}  // namespace fedsel::agents
