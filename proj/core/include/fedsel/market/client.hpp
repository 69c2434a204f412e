#pragma once

#include <random>
#include <string>
#include <vector>

#include "fedsel/market/distribution.hpp"
#include "fedsel/market/quality.hpp"

namespace fedsel::market {

struct DatasetProfile {
  int size = 0;
  // Grid value the profile was drawn with; prices use this exact value.
  double target_emd = 0.0;
  LabelDistribution distribution;
  // emd(distribution, reference), recomputed from the realised histogram.
  double emd = 0.0;
  double dqi = 0.0;
};

struct ServiceSpec {
  int id = 0;
  std::string dataset;
  double budget_per_slot = 20.0;
  double target_accuracy = 0.97;
  double reward_base = 60.0;
  DqiParams dqi_params = DqiParams::emnist();
  LabelDistribution reference = LabelDistribution::uniform(10);

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct ClientState {
  int id = 0;
  int cores = 2;
  std::vector<DatasetProfile> profiles;  // indexed by service
  std::vector<double> cost_bids;         // indexed by service
};

struct Grids {
  std::vector<int> sizes{100, 200, 300, 400};
  std::vector<double> emds{0.4, 0.6, 0.8, 1.0};

  void validate() const;
};

/// Assembles a consistent profile: emd and dqi are recomputed from the
/// synthesised distribution.
DatasetProfile make_profile(int size, double target_emd, const ServiceSpec& service,
                            std::mt19937_64& rng);

/// Redraws every per-service profile uniformly from the grids and reprices.
ClientState refresh_client(const ClientState& client, const std::vector<ServiceSpec>& services,
                           const Grids& grids, const PricingRule& pricing, std::mt19937_64& rng);

}  // namespace fedsel::market
