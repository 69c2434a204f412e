#include "fedsel/env/episode.hpp"

namespace fedsel::env {

std::vector<ServiceEpisodeSummary> run_episode(Environment& env, std::uint64_t seed,
                                               const ActFn& act, const StepFn& on_step) {
  auto observations = env.reset(seed);
  const auto services = observations.size();
  std::vector<ServiceEpisodeSummary> summary(services);
  std::vector<int> served_total(services, 0);

  while (!env.done()) {
    std::vector<std::optional<HybridAction>> actions(services);
    for (std::size_t m = 0; m < services; ++m) {
      if (observations[m]) actions[m] = act(*observations[m]);
    }
    StepResult result = env.step(actions);
    for (std::size_t m = 0; m < services; ++m) {
      const auto& so = result.outcome.services[m];
      auto& s = summary[m];
      s.cumulative_reward += so.reward;
      s.final_accuracy = so.accuracy;
      if (!so.active) continue;
      s.total_spend += so.spend;
      s.active_slots += 1;
      served_total[m] += static_cast<int>(so.served.size());
      if (so.exited) s.slots_to_target = result.outcome.slot;
    }
    if (on_step) on_step(result);
    observations = std::move(result.observations);
  }
  for (std::size_t m = 0; m < services; ++m) {
    if (summary[m].active_slots > 0) {
      summary[m].clients_per_slot =
          static_cast<double>(served_total[m]) / static_cast<double>(summary[m].active_slots);
    }
  }
  return summary;
}

}  // namespace fedsel::env
