#include "fedsel/agents/trainer.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

#include "fedsel/market/quality.hpp"
#include "fedsel/seeding.hpp"

namespace fedsel::agents {

std::vector<HybridAgent> make_agents(const env::MarketConfig& market, const AgentConfig& config,
                                     std::uint64_t seed) {
  double lowest_bid = std::numeric_limits<double>::infinity();
  for (int size : market.grids.sizes) {
    for (double v : market.grids.emds) lowest_bid = std::min(lowest_bid, market.pricing(size, v));
  }
  double dqi_low = std::numeric_limits<double>::infinity();
  double dqi_high = -std::numeric_limits<double>::infinity();
  for (const auto& service : market.services) {
    for (int size : market.grids.sizes) {
      for (double v : market.grids.emds) {
        const double q = market::dqi(size, v, service.dqi_params);
        dqi_low = std::min(dqi_low, q);
        dqi_high = std::max(dqi_high, q);
      }
    }
  }
  if (!(dqi_high > dqi_low)) dqi_high = dqi_low + 1.0;
  std::vector<HybridAgent> agents;
  agents.reserve(market.services.size());
  for (const auto& service : market.services) {
    AgentShape shape;
    shape.clients = market.clients;
    shape.services = market.num_services();
    shape.budget = service.budget_per_slot;
    shape.payment_low = std::min(lowest_bid, service.budget_per_slot / 2.0);
    shape.payment_high = service.budget_per_slot;
    shape.reward_base = service.reward_base;
    shape.dqi_low = dqi_low;
    shape.dqi_high = dqi_high;
    agents.emplace_back(config, shape,
                        derive_seed(seed, streams::kAgent, static_cast<std::uint64_t>(service.id)));
  }
  return agents;
}

TrainResult train(env::Environment& environment, std::vector<HybridAgent>& agents, int episodes,
                  std::uint64_t seed, const TrainCallbacks& callbacks) {
  const auto services = static_cast<std::size_t>(environment.config().num_services());
  if (agents.size() != services) throw std::invalid_argument("train: one agent per service");

  TrainResult result;
  result.episode_rewards.assign(services, {});
  std::vector<std::optional<SerialDecision>> pending(services);

  for (int ep = 0; ep < episodes; ++ep) {
    auto act = [&](const env::Observation& obs) {
      auto& agent = agents[static_cast<std::size_t>(obs.service)];
      const int position = agent.episodes_completed();
      auto decision = agent.select_action_serial(obs, agent.config().epsilon.at(position),
                                                 agent.config().payment_noise.at(position));
      env::HybridAction action = decision.action;
      pending[static_cast<std::size_t>(obs.service)] = std::move(decision);
      return action;
    };
    auto on_step = [&](const env::StepResult& step) {
      for (std::size_t m = 0; m < services; ++m) {
        if (!pending[m]) continue;
        const auto& so = step.outcome.services[m];
        const bool terminal = so.exited || step.episode_done;
        const auto& next = step.observations[m];
        agents[m].record_slot(*pending[m], so.reward, next ? &*next : nullptr, terminal);
        pending[m].reset();
        UpdateStats stats;
        for (int u = 0; u < agents[m].config().updates_per_slot; ++u) stats = agents[m].learn();
        if (callbacks.on_update) callbacks.on_update(ep, step.outcome.slot, static_cast<int>(m), stats);
      }
      if (callbacks.on_step) callbacks.on_step(ep, step);
    };

    auto summary = env::run_episode(
        environment, derive_seed(seed, streams::kEnvironment, static_cast<std::uint64_t>(ep)), act,
        on_step);
    for (std::size_t m = 0; m < services; ++m) {
      result.episode_rewards[m].push_back(summary[m].cumulative_reward);
      agents[m].set_episodes_completed(agents[m].episodes_completed() + 1);
    }
    if (callbacks.on_episode) callbacks.on_episode(ep, summary);
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

}  // namespace fedsel::agents
