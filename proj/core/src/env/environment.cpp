#include "fedsel/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fedsel::env {

MarketConfig MarketConfig::defaults() {
  MarketConfig config;
  struct Row {
    const char* dataset;
    double target;
    double omega;
  };
  // Fitted DQI parameters are only published for EMNIST; the other two
  // services reuse them until fitted values are supplied via config.
  const Row rows[] = {{"mnist", 0.97, 60.0}, {"fashion-mnist", 0.85, 100.0}, {"emnist", 0.97, 30.0}};
  int id = 0;
  for (const auto& row : rows) {
    market::ServiceSpec s;
    s.id = id++;
    s.dataset = row.dataset;
    s.budget_per_slot = 20.0;
    s.target_accuracy = row.target;
    s.reward_base = row.omega;
    s.dqi_params = market::DqiParams::emnist();
    s.reference = market::LabelDistribution::uniform(10);
    config.services.push_back(std::move(s));
  }
  return config;
}

void MarketConfig::validate() const {
  if (services.empty()) throw std::invalid_argument("market needs at least one service");
  if (clients < 1) throw std::invalid_argument("market needs at least one client");
  if (cores < 1) throw std::invalid_argument("clients need at least one core");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!pricing) throw std::invalid_argument("market pricing rule is empty");
  grids.validate();
  for (std::size_t m = 0; m < services.size(); ++m) {
    services[m].validate();
    if (services[m].id != static_cast<int>(m)) {
      throw std::invalid_argument("service ids must equal their position (service " +
                                  std::to_string(m) + ")");
    }
  }
  for (int size : grids.sizes) {
    for (double v : grids.emds) pricing(size, v);  // throws on a negative bid
  }
}

Environment::Environment(MarketConfig config, std::shared_ptr<AccuracyOracle> oracle)
    : config_(std::move(config)), oracle_(std::move(oracle)) {
  config_.validate();
  if (!oracle_) oracle_ = std::make_shared<SurrogateOracle>(config_.services);
  budget_scale_ = 0.0;
  for (const auto& s : config_.services) budget_scale_ = std::max(budget_scale_, s.budget_per_slot);
  bid_scale_ = 0.0;
  for (int size : config_.grids.sizes) {
    for (double v : config_.grids.emds) bid_scale_ = std::max(bid_scale_, config_.pricing(size, v));
  }
  if (bid_scale_ <= 0.0) bid_scale_ = 1.0;
}

std::vector<std::optional<Observation>> Environment::reset(std::uint64_t seed) {
  const auto services = static_cast<std::size_t>(config_.num_services());
  rng_.seed(seed);
  clients_.assign(static_cast<std::size_t>(config_.clients), market::ClientState{});
  for (int c = 0; c < config_.clients; ++c) {
    clients_[static_cast<std::size_t>(c)].id = c;
    clients_[static_cast<std::size_t>(c)].cores = config_.cores;
  }
  accuracy_.assign(services, AccuracyState{});
  active_.assign(services, true);
  slot_ = 1;
  done_ = false;
  refresh_market();
  return observe();
}

void Environment::refresh_market() {
  const int m = config_.num_services();
  auto info = std::make_shared<GlobalInfo>();
  info->dqi.resize(config_.clients, m);
  info->bids.resize(config_.clients, m);
  for (auto& client : clients_) {
    client = market::refresh_client(client, config_.services, config_.grids, config_.pricing, rng_);
    for (int j = 0; j < m; ++j) {
      info->dqi(client.id, j) = client.profiles[static_cast<std::size_t>(j)].dqi;
      info->bids(client.id, j) = client.cost_bids[static_cast<std::size_t>(j)];
    }
  }
  global_ = std::move(info);
}

std::vector<std::optional<Observation>> Environment::observe() const {
  std::vector<std::optional<Observation>> out(static_cast<std::size_t>(config_.num_services()));
  for (int m = 0; m < config_.num_services(); ++m) {
    if (!active_[static_cast<std::size_t>(m)]) continue;
    Observation obs;
    obs.service = m;
    obs.slot = std::min(slot_, config_.horizon);
    obs.horizon = config_.horizon;
    obs.global = global_;
    obs.budget = config_.services[static_cast<std::size_t>(m)].budget_per_slot;
    obs.accuracy = accuracy_[static_cast<std::size_t>(m)].accuracy;
    obs.budget_scale = budget_scale_;
    obs.bid_scale = bid_scale_;
    out[static_cast<std::size_t>(m)] = std::move(obs);
  }
  return out;
}

StepResult Environment::step(std::span<const std::optional<HybridAction>> actions) {
  if (done_) throw std::logic_error("step called on a finished episode; call reset");
  const int num_services = config_.num_services();
  if (static_cast<int>(actions.size()) != num_services) {
    throw std::invalid_argument("step: expected one action slot per service");
  }
  std::vector<double> budgets;
  for (int m = 0; m < num_services; ++m) {
    const auto& action = actions[static_cast<std::size_t>(m)];
    const auto& spec = config_.services[static_cast<std::size_t>(m)];
    budgets.push_back(spec.budget_per_slot);
    if (!active_[static_cast<std::size_t>(m)]) {
      if (action) throw std::invalid_argument("step: action from exited service " + std::to_string(m));
      continue;
    }
    if (!action) throw std::invalid_argument("step: missing action for service " + std::to_string(m));
    if (static_cast<int>(action->selected.size()) != config_.clients ||
        static_cast<int>(action->payments.size()) != config_.clients) {
      throw std::invalid_argument("step: action width does not match client count");
    }
    for (int c = 0; c < config_.clients; ++c) {
      const double p = action->payments[static_cast<std::size_t>(c)];
      if (action->is_selected(c) && !(p >= 0.0 && std::isfinite(p))) {
        throw std::invalid_argument("step: payments must be finite and >= 0");
      }
    }
    if (action_spend(*action) > spec.budget_per_slot) {
      throw std::invalid_argument("step: action of service " + std::to_string(m) +
                                  " exceeds its budget");
    }
  }

  const Assignment assignment = resolve_conflicts(actions, global_->bids, config_.cores);
  const std::vector<double> spend = settle(assignment, budgets);

  StepResult result;
  auto& outcome = result.outcome;
  outcome.slot = slot_;
  outcome.services.resize(static_cast<std::size_t>(num_services));
  outcome.client_load.resize(static_cast<std::size_t>(config_.clients));
  for (int c = 0; c < config_.clients; ++c) {
    outcome.client_load[static_cast<std::size_t>(c)] =
        static_cast<int>(assignment.services_of_client[static_cast<std::size_t>(c)].size());
  }

  for (int m = 0; m < num_services; ++m) {
    const auto idx = static_cast<std::size_t>(m);
    const auto& spec = config_.services[idx];
    auto& so = outcome.services[idx];
    if (!active_[idx]) {
      so.accuracy = accuracy_[idx].accuracy;
      if (config_.exit_reward == ExitRewardMode::kRepeated) {
        so.reward = reward(spec.reward_base, spec.target_accuracy);
      }
      continue;
    }
    so.active = true;
    so.served = assignment.served[idx];
    so.payments = assignment.payments[idx];
    so.spend = spend[idx];
    std::vector<const market::DatasetProfile*> profiles;
    for (int c : so.served) {
      const auto& client = clients_[static_cast<std::size_t>(c)];
      profiles.push_back(&client.profiles[idx]);
      so.cost_bids.push_back(client.cost_bids[idx]);
    }
    accuracy_[idx] = accuracy_update(spec, profiles, accuracy_[idx], *oracle_);
    so.accuracy = accuracy_[idx].accuracy;
    if (so.accuracy >= spec.target_accuracy) {
      so.exited = true;
      so.reward = reward(spec.reward_base, spec.target_accuracy);
      active_[idx] = false;
    } else {
      so.reward = reward(spec.reward_base, so.accuracy);
    }
  }

  const bool all_exited = std::none_of(active_.begin(), active_.end(), [](bool a) { return a; });
  slot_ += 1;
  done_ = all_exited || slot_ > config_.horizon;
  result.episode_done = done_;
  if (!done_) refresh_market();
  result.observations = observe();
  return result;
}

}  // namespace fedsel::env
