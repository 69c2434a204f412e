#include "fedsel/env/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedsel::env {

SurrogateOracle::SurrogateOracle(std::vector<market::ServiceSpec> services)
    : services_(std::move(services)) {}

double SurrogateOracle::accuracy(const OracleQuery& query) {
  if (query.service < 0 || static_cast<std::size_t>(query.service) >= services_.size()) {
    throw std::out_of_range("SurrogateOracle: unknown service");
  }
  const auto& params = services_[static_cast<std::size_t>(query.service)].dqi_params;
  return std::clamp(market::dqi(query.cumulative_size, query.emd, params), 0.0, 1.0);
}

AccuracyState accuracy_update(const market::ServiceSpec& service,
                              std::span<const market::DatasetProfile* const> served,
                              const AccuracyState& state, AccuracyOracle& oracle) {
  if (served.empty()) return state;

  std::vector<double> weights;
  std::vector<market::LabelDistribution> parts;
  weights.reserve(served.size() + 1);
  parts.reserve(served.size() + 1);
  if (state.cumulative_size > 0.0) {
    weights.push_back(state.cumulative_size);
    parts.push_back(state.cumulative_distribution);
  }
  double added = 0.0;
  for (const auto* profile : served) {
    weights.push_back(static_cast<double>(profile->size));
    parts.push_back(profile->distribution);
    added += profile->size;
  }

  AccuracyState next;
  next.cumulative_size = state.cumulative_size + added;
  next.cumulative_distribution = market::merge(weights, parts);
  const OracleQuery query{service.id, service.dataset, next.cumulative_size,
                          &next.cumulative_distribution,
                          market::emd(next.cumulative_distribution, service.reference)};
  const double candidate = std::clamp(oracle.accuracy(query), 0.0, 1.0);
  next.accuracy = std::max(state.accuracy, candidate);
  return next;
}

double reward(double reward_base, double accuracy) { return std::pow(reward_base, accuracy); }

}  // namespace fedsel::env
