#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fedsel/env/accuracy.hpp"
#include "fedsel/env/settlement.hpp"
#include "fedsel/env/types.hpp"
#include "fedsel/market/client.hpp"

namespace fedsel::env {

struct MarketConfig {
  std::vector<market::ServiceSpec> services;
  int clients = 20;
  int cores = 2;
  int horizon = 80;
  market::Grids grids;
  ExitRewardMode exit_reward = ExitRewardMode::kOnce;
  market::PricingRule pricing = market::linear_cost_bid;

  /// Three services (mnist, fashion-mnist, emnist), 20 dual-core clients,
  /// budget 20, 80 slots.
  static MarketConfig defaults();
  void validate() const;
  int num_services() const { return static_cast<int>(services.size()); }
};

struct ServiceOutcome {
  bool active = false;  // acted this slot
  std::vector<int> served;
  std::vector<double> payments;
  std::vector<double> cost_bids;  // bids of the served clients
  double spend = 0.0;
  double accuracy = 0.0;
  double reward = 0.0;
  bool exited = false;  // reached its target this slot
};

struct SlotOutcome {
  int slot = 0;
  std::vector<ServiceOutcome> services;
  std::vector<int> client_load;  // services served per client
};

struct StepResult {
  SlotOutcome outcome;
  std::vector<std::optional<Observation>> observations;  // nullopt once exited
  bool episode_done = false;
};

/// The multi-service market game. A single owner drives reset/step.
class Environment {
 public:
  explicit Environment(MarketConfig config, std::shared_ptr<AccuracyOracle> oracle = nullptr);

  std::vector<std::optional<Observation>> reset(std::uint64_t seed);

  /// actions[m] must hold a value exactly when service m is active.
  StepResult step(std::span<const std::optional<HybridAction>> actions);

  const MarketConfig& config() const { return config_; }
  int slot() const { return slot_; }
  bool done() const { return done_; }
  bool active(int service) const { return active_[static_cast<std::size_t>(service)]; }
  const AccuracyState& accuracy_state(int service) const {
    return accuracy_[static_cast<std::size_t>(service)];
  }
  const std::vector<market::ClientState>& clients() const { return clients_; }
  const GlobalInfo& global_info() const { return *global_; }

 private:
  void refresh_market();
  std::vector<std::optional<Observation>> observe() const;

  MarketConfig config_;
  std::shared_ptr<AccuracyOracle> oracle_;
  std::mt19937_64 rng_;
  std::vector<market::ClientState> clients_;
  std::shared_ptr<GlobalInfo> global_;
  std::vector<AccuracyState> accuracy_;
  std::vector<bool> active_;
  double budget_scale_ = 1.0;
  double bid_scale_ = 1.0;
  int slot_ = 0;
  bool done_ = true;
};

}  // namespace fedsel::env
