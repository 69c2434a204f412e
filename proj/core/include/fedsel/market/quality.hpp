#pragma once

#include <array>
#include <functional>

namespace fedsel::market {

/// Curve-fitting parameters eta_1..eta_6 of the data quality indicator.
struct DqiParams {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
  double eta5 = 0.0;
  double eta6 = 1.0;

  static DqiParams from_array(const std::array<double, 6>& eta);
  std::array<double, 6> as_array() const;

  /// Fitted values for EMNIST.
  static DqiParams emnist();

  bool operator==(const DqiParams&) const = default;
};

/// alpha(v) = eta4 * exp(-((v + eta5) / eta6)^2)
double alpha(double emd_value, const DqiParams& params);

/// Psi = alpha(v) - eta1 * exp(-eta2 * (eta3 * size)^alpha(v)).
/// Throws std::domain_error if any intermediate is non-finite.
double dqi(double size, double emd_value, const DqiParams& params);

/// A client's claimed price for one service given its data size and EMD.
using PricingRule = std::function<double(int size, double emd_value)>;

/// 0.025 * size - emd. Throws std::domain_error when the result is negative.
double linear_cost_bid(int size, double emd_value);

}  // namespace fedsel::market
