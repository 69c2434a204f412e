#include "fedsel/env/settlement.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fedsel::env {

Assignment resolve_conflicts(std::span<const std::optional<HybridAction>> offers,
                             const Eigen::MatrixXd& bids, int cores) {
  const int clients = static_cast<int>(bids.rows());
  const int services = static_cast<int>(offers.size());
  if (bids.cols() != services) throw std::invalid_argument("resolve_conflicts: bid matrix width");

  Assignment out;
  out.served.resize(static_cast<std::size_t>(services));
  out.payments.resize(static_cast<std::size_t>(services));
  out.services_of_client.resize(static_cast<std::size_t>(clients));

  struct Offer {
    double payment;
    int service;
  };
  std::vector<Offer> candidates;
  for (int c = 0; c < clients; ++c) {
    candidates.clear();
    for (int m = 0; m < services; ++m) {
      const auto& action = offers[static_cast<std::size_t>(m)];
      if (!action || !action->is_selected(c)) continue;
      const double pay = action->payments[static_cast<std::size_t>(c)];
      if (pay < bids(c, m)) continue;
      candidates.push_back({pay, m});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Offer& a, const Offer& b) {
      if (a.payment != b.payment) return a.payment > b.payment;
      return a.service < b.service;
    });
    const auto take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(cores));
    auto& mine = out.services_of_client[static_cast<std::size_t>(c)];
    for (std::size_t k = 0; k < take; ++k) mine.push_back(candidates[k].service);
    std::sort(mine.begin(), mine.end());
  }

  // Client-major traversal keeps every served list in ascending client order.
  for (int c = 0; c < clients; ++c) {
    for (int m : out.services_of_client[static_cast<std::size_t>(c)]) {
      out.served[static_cast<std::size_t>(m)].push_back(c);
      out.payments[static_cast<std::size_t>(m)].push_back(
          offers[static_cast<std::size_t>(m)]->payments[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

std::vector<double> settle(const Assignment& assignment, std::span<const double> budgets) {
  if (budgets.size() != assignment.payments.size()) {
    throw std::invalid_argument("settle: one budget per service required");
  }
  std::vector<double> spend(budgets.size(), 0.0);
  for (std::size_t m = 0; m < budgets.size(); ++m) {
    for (double p : assignment.payments[m]) spend[m] += p;
    if (spend[m] > budgets[m]) {
      throw std::logic_error("settle: service " + std::to_string(m) + " spends " +
                             std::to_string(spend[m]) + " above budget " +
                             std::to_string(budgets[m]));
    }
  }
  return spend;
}

}  // namespace fedsel::env
