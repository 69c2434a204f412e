#include "fedsel/baselines/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedsel::baselines {

BaselineKind parse_baseline(std::string_view name) {
  if (name == "lcfa") return BaselineKind::kLowCostFirst;
  if (name == "hqfa") return BaselineKind::kHighQualityFirst;
  if (name == "random") return BaselineKind::kRandom;
  throw std::invalid_argument("unknown baseline '" + std::string(name) + "'");
}

std::string_view baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kLowCostFirst: return "lcfa";
    case BaselineKind::kHighQualityFirst: return "hqfa";
    case BaselineKind::kRandom: return "random";
  }
  return "unknown";
}

env::HybridAction greedy_at_bid(const env::Observation& obs, std::span<const int> order) {
  env::HybridAction action = env::HybridAction::empty(obs.clients());
  for (int c : order) {
    env::HybridAction trial = action;
    trial.select(c, obs.own_bid(c));
    if (env::action_spend(trial) <= obs.budget) action = std::move(trial);
  }
  return action;
}

namespace {

std::vector<int> client_ids(const env::Observation& obs) {
  std::vector<int> ids(static_cast<std::size_t>(obs.clients()));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

env::HybridAction lcfa_select(const env::Observation& obs) {
  auto order = client_ids(obs);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return obs.own_bid(a) < obs.own_bid(b); });
  return greedy_at_bid(obs, order);
}

env::HybridAction hqfa_select(const env::Observation& obs) {
  auto order = client_ids(obs);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return obs.own_dqi(a) > obs.own_dqi(b); });
  return greedy_at_bid(obs, order);
}

env::HybridAction random_select(const env::Observation& obs, std::mt19937_64& rng) {
  auto order = client_ids(obs);
  std::shuffle(order.begin(), order.end(), rng);
  return greedy_at_bid(obs, order);
}

env::HybridAction BaselinePolicy::act(const env::Observation& obs) {
  switch (kind_) {
    case BaselineKind::kLowCostFirst: return lcfa_select(obs);
    case BaselineKind::kHighQualityFirst: return hqfa_select(obs);
    case BaselineKind::kRandom: return random_select(obs, rng_);
  }
  throw std::logic_error("unreachable baseline kind");
}

}  // namespace fedsel::baselines
