#pragma once

#include <span>
#include <string>
#include <vector>

#include "fedsel/market/client.hpp"

namespace fedsel::env {

struct AccuracyState {
  double cumulative_size = 0.0;
  // Meaningless while cumulative_size == 0.
  market::LabelDistribution cumulative_distribution;
  double accuracy = 0.0;
};

struct OracleQuery {
  int service = 0;
  std::string dataset;
  double cumulative_size = 0.0;
  const market::LabelDistribution* distribution = nullptr;
  double emd = 0.0;
};

/// Maps the data a service has trained on so far to a test accuracy.
class AccuracyOracle {
 public:
  virtual ~AccuracyOracle() = default;
  /// Returns an accuracy in [0, 1].
  virtual double accuracy(const OracleQuery& query) = 0;
};

/// Evaluates the data quality indicator on the cumulative (size, emd) pair
/// with the service's own parameters, clamped to [0, 1].
class SurrogateOracle final : public AccuracyOracle {
 public:
  explicit SurrogateOracle(std::vector<market::ServiceSpec> services);
  double accuracy(const OracleQuery& query) override;

 private:
  std::vector<market::ServiceSpec> services_;
};

/// Folds the profiles served this slot into the running state and raises the
/// accuracy to the oracle's answer if that is higher. No-op when nothing was
/// served.
AccuracyState accuracy_update(const market::ServiceSpec& service,
                              std::span<const market::DatasetProfile* const> served,
                              const AccuracyState& state, AccuracyOracle& oracle);

/// Omega^accuracy.
double reward(double reward_base, double accuracy);

}  // namespace fedsel::env
