#include "fedsel/agents/hybrid_agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fedsel/numerics/serialize.hpp"

namespace fedsel::agents {

using numerics::Mlp;
using numerics::MlpSpec;

double LinearSchedule::at(int episode) const {
  if (decay_episodes <= 0 || episode >= decay_episodes) return end;
  const double frac = static_cast<double>(std::max(episode, 0)) / decay_episodes;
  return start + (end - start) * frac;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

int argmax_feasible(const Eigen::VectorXd& q, const std::vector<std::uint8_t>& feasible) {
  int best = -1;
  double best_value = kNegInf;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!feasible[static_cast<std::size_t>(i)]) continue;
    if (best < 0 || q(i) > best_value) {
      best = static_cast<int>(i);
      best_value = q(i);
    }
  }
  return best;
}

}  // namespace

HybridAgent::HybridAgent(AgentConfig config, AgentShape shape, std::uint64_t seed)
    : config_(std::move(config)), shape_(shape), rng_(seed), buffer_(config_.replay_capacity) {
  if (shape_.clients < 1 || shape_.services < 1) throw std::invalid_argument("agent shape");
  if (!(shape_.payment_high > shape_.payment_low)) {
    throw std::invalid_argument("agent payment bounds must satisfy low < high");
  }
  if (!(config_.gamma > 0.0 && config_.gamma <= 1.0)) throw std::invalid_argument("gamma");
  if (!(config_.tau > 0.0 && config_.tau < 1.0)) throw std::invalid_argument("tau");
  if (config_.batch_size == 0) throw std::invalid_argument("batch size");

  const int s = static_cast<int>(state_size());
  MlpSpec actor_spec;
  actor_spec.layer_sizes.push_back(s);
  for (int h : config_.hidden_layers) actor_spec.layer_sizes.push_back(h);
  actor_spec.layer_sizes.push_back(shape_.clients);
  actor_spec.hidden = config_.hidden_activation;
  actor_spec.output = numerics::OutputActivation::kSigmoid;

  MlpSpec critic_spec;
  critic_spec.layer_sizes.push_back(s + shape_.clients);
  for (int h : config_.hidden_layers) critic_spec.layer_sizes.push_back(h);
  critic_spec.layer_sizes.push_back(shape_.clients + 1);
  critic_spec.hidden = config_.hidden_activation;
  critic_spec.output = numerics::OutputActivation::kIdentity;

  actor_ = Mlp::init(actor_spec, rng_);
  critic_ = Mlp::init(critic_spec, rng_);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = numerics::AdamState::for_params(actor_.params(), {config_.actor_learning_rate});
  critic_opt_ = numerics::AdamState::for_params(critic_.params(), {config_.critic_learning_rate});
}

std::size_t HybridAgent::state_size() const {
  return env::Observation::feature_size(shape_.clients, shape_.services) +
         static_cast<std::size_t>(shape_.clients) + 1;
}

double HybridAgent::reward_scale() const {
  return config_.reward_scale > 0.0 ? config_.reward_scale : 1.0 / shape_.reward_base;
}

std::vector<double> HybridAgent::micro_state(const env::Observation& obs,
                                             std::span<const std::uint8_t> selected,
                                             double remaining) const {
  std::vector<double> state = obs.features();
  // Grid DQI values crowd into a narrow band; stretch it to [0, 1] so the
  // differences between clients are not swamped by the common offset.
  const std::size_t block = static_cast<std::size_t>(shape_.clients * shape_.services);
  const double span = shape_.dqi_high - shape_.dqi_low;
  for (std::size_t i = 0; i < block; ++i) state[i] = (state[i] - shape_.dqi_low) / span;
  for (auto s : selected) state.push_back(s ? 1.0 : 0.0);
  state.push_back(remaining / shape_.budget);
  if (state.size() != state_size()) throw std::invalid_argument("micro_state: observation shape");
  return state;
}

Eigen::VectorXd HybridAgent::actor_normalized(std::span<const double> state) const {
  Eigen::VectorXd out = actor_.predict(Eigen::VectorXd(as_vector(state)));
  if (!out.allFinite()) throw std::domain_error("actor produced a non-finite output");
  return out;
}

double HybridAgent::to_payment(double normalized) const {
  return shape_.payment_low + normalized * (shape_.payment_high - shape_.payment_low);
}

Eigen::VectorXd HybridAgent::actor_forward(std::span<const double> state) const {
  Eigen::VectorXd u = actor_normalized(state);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = to_payment(u(i));
  return u;
}

Eigen::VectorXd HybridAgent::critic_q(std::span<const double> state,
                                      std::span<const double> normalized) const {
  if (normalized.size() != static_cast<std::size_t>(shape_.clients)) {
    throw std::invalid_argument("critic_q: payment vector width");
  }
  const Eigen::MatrixXd input = critic_input(Eigen::VectorXd(as_vector(state)),
                                             Eigen::VectorXd(as_vector(normalized)));
  Eigen::VectorXd q = critic_.predict(input).col(0);
  if (!q.allFinite()) throw std::domain_error("critic produced a non-finite output");
  return q;
}

SerialDecision HybridAgent::select_action_serial(const env::Observation& obs, double epsilon,
                                                 double noise) {
  return select_action_serial(obs, epsilon, noise, rng_);
}

SerialDecision HybridAgent::select_action_serial(const env::Observation& obs, double epsilon,
                                                 double noise, std::mt19937_64& rng) const {
  const int clients = shape_.clients;
  SerialDecision decision;
  decision.action = env::HybridAction::empty(clients);
  auto& action = decision.action;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::uint8_t> feasible(static_cast<std::size_t>(clients) + 1);

  for (;;) {
    const double remaining = shape_.budget - env::action_spend(action);
    MicroStep step;
    step.selected = action.selected;
    step.remaining = remaining;
    step.state = micro_state(obs, action.selected, remaining);
    Eigen::VectorXd u = actor_normalized(step.state);
    step.continuous.resize(static_cast<std::size_t>(clients));
    // noise is in currency units; the stored action stays normalised.
    const double noise_normalized = noise / (shape_.payment_high - shape_.payment_low);
    for (int c = 0; c < clients; ++c) {
      double v = u(c);
      if (noise > 0.0) v = std::clamp(v + noise_normalized * gauss(rng), 0.0, 1.0);
      step.continuous[static_cast<std::size_t>(c)] = v;
    }

    int feasible_count = 0;
    for (int c = 0; c < clients; ++c) {
      bool ok = !action.is_selected(c);
      if (ok) {
        env::HybridAction trial = action;
        trial.select(c, to_payment(step.continuous[static_cast<std::size_t>(c)]));
        ok = env::action_spend(trial) <= shape_.budget;
      }
      feasible[static_cast<std::size_t>(c)] = ok ? 1 : 0;
      feasible_count += ok ? 1 : 0;
    }
    feasible[static_cast<std::size_t>(clients)] = 1;

    int choice = clients;
    if (feasible_count > 0) {
      if (coin(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, feasible_count);  // + STOP
        int k = pick(rng);
        for (int i = 0; i <= clients; ++i) {
          if (feasible[static_cast<std::size_t>(i)] && k-- == 0) {
            choice = i;
            break;
          }
        }
      } else {
        choice = argmax_feasible(critic_q(step.state, step.continuous), feasible);
      }
    }
    step.discrete = choice;
    decision.steps.push_back(std::move(step));
    if (choice == clients) break;
    action.select(choice, to_payment(decision.steps.back().continuous[static_cast<std::size_t>(choice)]));
  }
  return decision;
}

void HybridAgent::record_slot(const SerialDecision& decision, double slot_reward,
                              const env::Observation* next_obs, bool terminal) {
  const auto& steps = decision.steps;
  if (steps.empty()) throw std::invalid_argument("record_slot: decision has no micro-steps");
  const double scale = reward_scale();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Transition t;
    t.state = steps[i].state;
    t.discrete = steps[i].discrete;
    t.continuous = steps[i].continuous;
    if (i + 1 < steps.size()) {
      t.reward = 0.0;
      t.next_state = steps[i + 1].state;
      t.next_selected = steps[i + 1].selected;
      t.next_remaining = steps[i + 1].remaining;
      t.discount = 1.0;
    } else {
      t.reward = slot_reward * scale;
      if (terminal || next_obs == nullptr) {
        t.terminal = true;
        t.discount = 0.0;
        t.next_state = t.state;
        t.next_selected.assign(static_cast<std::size_t>(shape_.clients), 0);
        t.next_remaining = shape_.budget;
      } else {
        t.next_selected.assign(static_cast<std::size_t>(shape_.clients), 0);
        t.next_remaining = shape_.budget;
        t.next_state = micro_state(*next_obs, t.next_selected, shape_.budget);
        t.discount = config_.gamma;
      }
    }
    buffer_.push(std::move(t));
  }
}

Eigen::MatrixXd HybridAgent::stack(std::span<const Transition* const> batch, bool next) const {
  const auto rows = static_cast<Eigen::Index>(state_size());
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& v = next ? batch[b]->next_state : batch[b]->state;
    if (static_cast<Eigen::Index>(v.size()) != rows) throw std::invalid_argument("transition width");
    m.col(static_cast<Eigen::Index>(b)) = as_vector(v);
  }
  return m;
}

Eigen::MatrixXd HybridAgent::critic_input(const Eigen::MatrixXd& states,
                                          const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd x(states.rows() + actions.rows(), states.cols());
  x << states, actions;
  return x;
}

Eigen::VectorXd HybridAgent::critic_targets(std::span<const Transition* const> batch) const {
  const int clients = shape_.clients;
  const Eigen::MatrixXd next_states = stack(batch, true);
  const Eigen::MatrixXd next_actions = target_actor_.predict(next_states);
  const Eigen::MatrixXd next_q = target_critic_.predict(critic_input(next_states, next_actions));
  Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = *batch[b];
    const auto col = static_cast<Eigen::Index>(b);
    double best = next_q(clients, col);  // STOP is always available
    if (!t.terminal) {
      for (int c = 0; c < clients; ++c) {
        if (!t.next_selected.empty() && t.next_selected[static_cast<std::size_t>(c)]) continue;
        if (to_payment(next_actions(c, col)) > t.next_remaining) continue;
        best = std::max(best, next_q(c, col));
      }
    }
    y(col) = t.reward + (t.terminal ? 0.0 : t.discount * best);
  }
  return y;
}

double HybridAgent::update_critic(std::span<const Transition* const> batch) {
  if (batch.empty()) throw std::invalid_argument("update_critic: empty batch");
  const Eigen::VectorXd y = critic_targets(batch);
  Eigen::MatrixXd actions(shape_.clients, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    actions.col(static_cast<Eigen::Index>(b)) = as_vector(batch[b]->continuous);
  }
  const numerics::Tape tape = critic_.forward(critic_input(stack(batch, false), actions));
  const double n = static_cast<double>(batch.size());
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(tape.output.rows(), tape.output.cols());
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    const double diff = tape.output(batch[b]->discrete, col) - y(col);
    loss += diff * diff / n;
    grad(batch[b]->discrete, col) = 2.0 * diff / n;
  }
  auto back = critic_.backward(tape, grad);
  numerics::adam_step(critic_.mutable_params(), back.param_gradients, critic_opt_);
  return loss;
}

double HybridAgent::update_actor(std::span<const Transition* const> batch) {
  if (batch.empty()) throw std::invalid_argument("update_actor: empty batch");
  const Eigen::MatrixXd states = stack(batch, false);
  const numerics::Tape actor_tape = actor_.forward(states);
  const numerics::Tape critic_tape = critic_.forward(critic_input(states, actor_tape.output));
  const double n = static_cast<double>(batch.size());
  // Descend on -mean Q(s, a_d, mu(s)).
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(critic_tape.output.rows(), critic_tape.output.cols());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    grad(batch[b]->discrete, static_cast<Eigen::Index>(b)) = -1.0 / n;
  }
  const auto critic_back = critic_.backward(critic_tape, grad);
  const Eigen::MatrixXd action_grad = critic_back.input_gradient.bottomRows(shape_.clients);
  auto actor_back = actor_.backward(actor_tape, action_grad);
  const double norm = std::sqrt(actor_back.param_gradients.squared_norm());
  numerics::adam_step(actor_.mutable_params(), actor_back.param_gradients, actor_opt_);
  return norm;
}

void HybridAgent::update_targets() {
  numerics::soft_update(target_actor_.mutable_params(), actor_.params(), config_.tau);
  numerics::soft_update(target_critic_.mutable_params(), critic_.params(), config_.tau);
}

UpdateStats HybridAgent::learn() {
  UpdateStats stats;
  if (!config_.learning_enabled || buffer_.size() < config_.batch_size) return stats;
  const auto batch = buffer_.sample(config_.batch_size, rng_);
  stats.critic_loss = update_critic(batch);
  stats.actor_gradient_norm = update_actor(batch);
  update_targets();
  return stats;
}

void HybridAgent::save(std::ostream& out) const {
  out << "fedsel-agent 1\n";
  out << "episodes " << episodes_completed_ << '\n';
  numerics::write_mlp(out, actor_);
  numerics::write_mlp(out, critic_);
  numerics::write_mlp(out, target_actor_);
  numerics::write_mlp(out, target_critic_);
  numerics::write_adam(out, actor_opt_);
  numerics::write_adam(out, critic_opt_);
}

void HybridAgent::load(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "fedsel-agent" || version != 1) {
    throw std::runtime_error("agent checkpoint: bad header");
  }
  std::string key;
  int episodes = 0;
  if (!(in >> key >> episodes) || key != "episodes") {
    throw std::runtime_error("agent checkpoint: missing episode counter");
  }
  Mlp actor = numerics::read_mlp(in);
  Mlp critic = numerics::read_mlp(in);
  Mlp target_actor = numerics::read_mlp(in);
  Mlp target_critic = numerics::read_mlp(in);
  if (actor.spec() != actor_.spec() || critic.spec() != critic_.spec() ||
      target_actor.spec() != actor_.spec() || target_critic.spec() != critic_.spec()) {
    throw std::runtime_error("agent checkpoint: network shapes do not match this agent");
  }
  auto actor_opt = numerics::read_adam(in, actor_.spec());
  auto critic_opt = numerics::read_adam(in, critic_.spec());
  actor_ = std::move(actor);
  critic_ = std::move(critic);
  target_actor_ = std::move(target_actor);
  target_critic_ = std::move(target_critic);
  actor_opt_ = std::move(actor_opt);
  critic_opt_ = std::move(critic_opt);
  episodes_completed_ = episodes;
}

}  // namespace fedsel::agents
