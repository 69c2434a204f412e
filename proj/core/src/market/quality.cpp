#include "fedsel/market/quality.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedsel::market {

DqiParams DqiParams::from_array(const std::array<double, 6>& eta) {
  if (eta[5] == 0.0) throw std::invalid_argument("DqiParams: eta6 must be non-zero");
  return DqiParams{eta[0], eta[1], eta[2], eta[3], eta[4], eta[5]};
}

std::array<double, 6> DqiParams::as_array() const {
  return {eta1, eta2, eta3, eta4, eta5, eta6};
}

DqiParams DqiParams::emnist() {
  return DqiParams{-0.1922, 0.2613, 0.00063, 0.7084, 0.3189, 1.233};
}

double alpha(double emd_value, const DqiParams& params) {
  const double scaled = (emd_value + params.eta5) / params.eta6;
  return params.eta4 * std::exp(-scaled * scaled);
}

double dqi(double size, double emd_value, const DqiParams& params) {
  if (size < 0.0) throw std::invalid_argument("dqi: negative data size");
  const double a = alpha(emd_value, params);
  const double psi = a - params.eta1 * std::exp(-params.eta2 * std::pow(params.eta3 * size, a));
  if (!std::isfinite(a) || !std::isfinite(psi)) {
    throw std::domain_error("dqi: non-finite value for size " + std::to_string(size));
  }
  return psi;
}

double linear_cost_bid(int size, double emd_value) {
  const double bid = 0.025 * size - emd_value;
  if (bid < 0.0) {
    throw std::domain_error("cost bid is negative for size " + std::to_string(size) +
                            ", emd " + std::to_string(emd_value));
  }
  return bid;
}

}  // namespace fedsel::market
