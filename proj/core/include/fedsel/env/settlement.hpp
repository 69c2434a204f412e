#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fedsel/env/types.hpp"

namespace fedsel::env {

struct Assignment {
  // Per service: served client ids (ascending) and the matching payments.
  std::vector<std::vector<int>> served;
  std::vector<std::vector<double>> payments;
  // Per client: the services it trains for this slot.
  std::vector<std::vector<int>> services_of_client;
};

/// Clears the market. For each client, offers below its cost bid are
/// dropped; of the rest the `cores` highest payments are served, ties going
/// to the lower service id. Inactive services pass std::nullopt.
Assignment resolve_conflicts(std::span<const std::optional<HybridAction>> offers,
                             const Eigen::MatrixXd& bids, int cores);

/// Money actually spent per service: only served pairs are charged.
/// Throws std::logic_error if a service is charged above its budget.
std::vector<double> settle(const Assignment& assignment, std::span<const double> budgets);

}  // namespace fedsel::env
