#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fedsel/agents/replay_buffer.hpp"
#include "fedsel/env/types.hpp"
#include "fedsel/numerics/adam.hpp"
#include "fedsel/numerics/mlp.hpp"

namespace fedsel::agents {

/// Linear interpolation from `start` to `end` over `decay_episodes`, flat after.
struct LinearSchedule {
  double start = 1.0;
  double end = 0.05;
  int decay_episodes = 100;

  double at(int episode) const;
};

struct AgentConfig {
  double gamma = 0.95;
  double tau = 0.01;
  LinearSchedule epsilon{1.0, 0.05, 100};
  // Std-dev of the Gaussian payment noise, in currency units.
  LinearSchedule payment_noise{1.0, 0.1, 100};
  std::size_t replay_capacity = 4000;
  std::size_t batch_size = 32;
  double actor_learning_rate = 1e-4;
  double critic_learning_rate = 1e-3;
  std::vector<int> hidden_layers{120, 60};
  numerics::HiddenActivation hidden_activation = numerics::HiddenActivation::kRelu;
  // Rewards are multiplied by this before they reach the critic; <= 0 means
  // 1 / reward_base of the agent's service.
  double reward_scale = 0.0;
  bool learning_enabled = true;
  // Gradient steps (critic, actor, targets) taken after every slot.
  int updates_per_slot = 1;
};

/// Sizes and price bounds fixed for the lifetime of one agent.
struct AgentShape {
  int clients = 20;
  int services = 3;
  double budget = 20.0;
  double payment_low = 1.5;   // lowest payment the actor can offer
  double payment_high = 20.0;  // highest; usually the budget
  double reward_base = 60.0;
  double dqi_low = 0.0;  // DQI range over the grids; rescales the DQI block
  double dqi_high = 1.0;
};

/// One decision of the serial selection loop.
struct MicroStep {
  std::vector<double> state;
  std::vector<std::uint8_t> selected;  // mask the state was built from
  double remaining = 0.0;
  int discrete = 0;
  std::vector<double> continuous;
};

struct SerialDecision {
  env::HybridAction action;
  std::vector<MicroStep> steps;  // always ends with a STOP decision
};

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_gradient_norm = 0.0;
};

/// Independent parametrized-action actor-critic learner owned by one service.
///
/// The actor maps a micro-state to one payment per client; the critic scores
/// every client plus STOP given that payment vector. Clients are picked one
/// at a time until STOP or until no client is affordable.
class HybridAgent {
 public:
  HybridAgent(AgentConfig config, AgentShape shape, std::uint64_t seed);

  const AgentConfig& config() const { return config_; }
  const AgentShape& shape() const { return shape_; }
  int stop_index() const { return shape_.clients; }
  std::size_t state_size() const;

  /// Observation features (DQI block rescaled to [dqi_low, dqi_high] -> [0, 1])
  /// followed by the already-selected mask and the remaining budget as a
  /// fraction of the budget.
  std::vector<double> micro_state(const env::Observation& obs,
                                  std::span<const std::uint8_t> selected,
                                  double remaining) const;

  /// Normalised actor output in [0, 1]^C.
  Eigen::VectorXd actor_normalized(std::span<const double> state) const;
  /// Payments in [payment_low, payment_high]^C.
  Eigen::VectorXd actor_forward(std::span<const double> state) const;
  double to_payment(double normalized) const;

  /// One value per client followed by STOP.
  Eigen::VectorXd critic_q(std::span<const double> state, std::span<const double> normalized) const;

  SerialDecision select_action_serial(const env::Observation& obs, double epsilon,
                                      double noise, std::mt19937_64& rng) const;
  SerialDecision select_action_serial(const env::Observation& obs, double epsilon, double noise);

  /// Turns one slot's micro-steps into transitions. The last one carries the
  /// slot reward and bootstraps from `next_obs` with gamma unless terminal.
  void record_slot(const SerialDecision& decision, double slot_reward,
                   const env::Observation* next_obs, bool terminal);

  double update_critic(std::span<const Transition* const> batch);
  double update_actor(std::span<const Transition* const> batch);
  void update_targets();

  /// Samples a batch (if enough data) and performs critic, actor and target
  /// updates. Returns zeros when skipped.
  UpdateStats learn();

  /// Critic targets y = r + discount * Q'(s', a_d', mu'(s')).
  Eigen::VectorXd critic_targets(std::span<const Transition* const> batch) const;

  const ReplayBuffer& buffer() const { return buffer_; }
  ReplayBuffer& buffer() { return buffer_; }
  const numerics::Mlp& actor() const { return actor_; }
  const numerics::Mlp& critic() const { return critic_; }
  numerics::Mlp& mutable_actor() { return actor_; }
  numerics::Mlp& mutable_critic() { return critic_; }
  const numerics::Mlp& target_actor() const { return target_actor_; }
  const numerics::Mlp& target_critic() const { return target_critic_; }
  numerics::Mlp& mutable_target_critic() { return target_critic_; }
  numerics::Mlp& mutable_target_actor() { return target_actor_; }

  int episodes_completed() const { return episodes_completed_; }
  void set_episodes_completed(int n) { episodes_completed_ = n; }
  double reward_scale() const;

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  Eigen::MatrixXd stack(std::span<const Transition* const> batch, bool next) const;
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) const;

  AgentConfig config_;
  AgentShape shape_;
  std::mt19937_64 rng_;
  numerics::Mlp actor_;
  numerics::Mlp critic_;
  numerics::Mlp target_actor_;
  numerics::Mlp target_critic_;
  numerics::AdamState actor_opt_;
  numerics::AdamState critic_opt_;
  ReplayBuffer buffer_;
  int episodes_completed_ = 0;
};

}  // namespace fedsel::agents
