#pragma once

// Independent re-implementations used as test oracles. They share no code
// with the library beyond the plain data types they read.

#include <cmath>
#include <cstdint>
#include <vector>

#include "fedsel/env/environment.hpp"
#include "fedsel/market/client.hpp"

namespace fedsel::testing {

inline long double oracle_dqi(long double size, long double v, const market::DqiParams& p) {
  const long double z = (v + p.eta5) / p.eta6;
  const long double a = p.eta4 * std::exp(-z * z);
  return a - p.eta1 * std::exp(-p.eta2 * std::pow(p.eta3 * size, a));
}

/// Accuracy reached by a fresh service that trains on exactly `subset`.
inline double oracle_union_accuracy(const std::vector<const market::DatasetProfile*>& subset,
                                    const market::ServiceSpec& service) {
  if (subset.empty()) return 0.0;
  const std::size_t classes = service.reference.classes();
  std::vector<long double> mass(classes, 0.0L);
  long double total = 0.0L;
  for (const auto* p : subset) {
    total += p->size;
    for (std::size_t y = 0; y < classes; ++y) mass[y] += p->size * static_cast<long double>(p->distribution[y]);
  }
  long double gap = 0.0L;
  for (std::size_t y = 0; y < classes; ++y) gap += std::fabs(mass[y] / total - service.reference[y]);
  const long double psi = oracle_dqi(total, gap, service.dqi_params);
  return static_cast<double>(std::fmin(1.0L, std::fmax(0.0L, psi)));
}

struct BruteForceCase {
  double oracle_best = 0.0;   // max over affordable subsets, oracle arithmetic
  double library_best = 0.0;  // max over the same subsets, via Environment::step
  double max_subset_gap = 0.0;
  int affordable_subsets = 0;
};

/// Single service, K = 1, one slot: enumerate every subset whose bid-price
/// payments fit the budget and score it both ways.
inline BruteForceCase brute_force_single_slot(const env::MarketConfig& config, std::uint64_t seed) {
  BruteForceCase out;
  env::Environment probe(config);
  probe.reset(seed);
  const int clients = config.clients;
  const auto& service = config.services.at(0);
  for (std::uint32_t mask = 0; mask < (1u << clients); ++mask) {
    env::HybridAction action = env::HybridAction::empty(clients);
    std::vector<const market::DatasetProfile*> subset;
    for (int c = 0; c < clients; ++c) {
      if (!(mask >> c & 1u)) continue;
      const auto& client = probe.clients()[static_cast<std::size_t>(c)];
      action.select(c, client.cost_bids[0]);
      subset.push_back(&client.profiles[0]);
    }
    if (env::action_spend(action) > service.budget_per_slot) continue;
    ++out.affordable_subsets;
    const double expected = oracle_union_accuracy(subset, service);

    env::Environment env(config);
    env.reset(seed);
    std::vector<std::optional<env::HybridAction>> actions{action};
    const auto result = env.step(actions);
    const double got = result.outcome.services[0].accuracy;
    out.oracle_best = std::max(out.oracle_best, expected);
    out.library_best = std::max(out.library_best, got);
    out.max_subset_gap = std::max(out.max_subset_gap, std::fabs(got - expected));
  }
  return out;
}

inline env::MarketConfig small_market(int clients, double budget) {
  env::MarketConfig config = env::MarketConfig::defaults();
  config.services.resize(1);
  config.services[0].budget_per_slot = budget;
  config.clients = clients;
  config.cores = 1;
  config.horizon = 1;
  return config;
}

}  // namespace fedsel::testing
