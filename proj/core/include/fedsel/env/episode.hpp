#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fedsel/env/environment.hpp"

namespace fedsel::env {

struct ServiceEpisodeSummary {
  double cumulative_reward = 0.0;
  double final_accuracy = 0.0;
  int slots_to_target = -1;  // -1 when the target was never reached
  double total_spend = 0.0;
  double clients_per_slot = 0.0;  // mean served clients over active slots
  int active_slots = 0;
};

using ActFn = std::function<HybridAction(const Observation&)>;
using StepFn = std::function<void(const StepResult&)>;

/// Resets `env` with `seed`, asks `act` for every active service each slot,
/// steps until the episode ends and reports `on_step` after every slot.
std::vector<ServiceEpisodeSummary> run_episode(Environment& env, std::uint64_t seed,
                                               const ActFn& act, const StepFn& on_step = {});

}  // namespace fedsel::env
