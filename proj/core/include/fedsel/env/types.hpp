#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace fedsel::env {

/// Market-wide information published each slot: one row per client, one
/// column per service.
struct GlobalInfo {
  Eigen::MatrixXd dqi;
  Eigen::MatrixXd bids;

  int clients() const { return static_cast<int>(dqi.rows()); }
  int services() const { return static_cast<int>(dqi.cols()); }
};

/// What one service sees at the start of a slot. The budget is private to
/// its owner; the global information is shared.
struct Observation {
  int service = 0;
  int slot = 1;     // 1-based
  int horizon = 1;  // N
  std::shared_ptr<const GlobalInfo> global;
  double budget = 0.0;
  double accuracy = 0.0;  // accuracy reached by the end of the previous slot
  double budget_scale = 1.0;
  double bid_scale = 1.0;

  int clients() const { return global->clients(); }
  double own_bid(int client) const { return global->bids(client, service); }
  double own_dqi(int client) const { return global->dqi(client, service); }

  /// Flattened network input: raw DQI matrix, bids / bid_scale, then
  /// budget / budget_scale, accuracy and slot / horizon.
  std::vector<double> features() const;
  static std::size_t feature_size(int clients, int services) {
    return static_cast<std::size_t>(2 * clients * services + 3);
  }
};

/// Selection bits plus offered payments for one service in one slot.
struct HybridAction {
  std::vector<std::uint8_t> selected;
  std::vector<double> payments;

  static HybridAction empty(int clients);
  int count() const;
  bool is_selected(int client) const { return selected[static_cast<std::size_t>(client)] != 0; }
  void select(int client, double payment);
};

/// Total committed money of an action, summed in client-id order. Every
/// budget check in the library goes through this one function so the
/// floating-point sum is identical everywhere.
double action_spend(const HybridAction& action);

enum class ExitRewardMode { kOnce, kRepeated };

}  // namespace fedsel::env
