#pragma once

#include <cstdint>

#include "fedsel/numerics/mlp.hpp"

namespace fedsel::numerics {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  MlpParams first_moment;
  MlpParams second_moment;
  std::int64_t step = 0;

  static AdamState for_params(const MlpParams& params, AdamConfig config);
};

/// One bias-corrected Adam descent step. Rejects non-finite gradients
/// (std::domain_error) before touching params or state.
void adam_step(MlpParams& params, const MlpParams& gradients, AdamState& state);

}  // namespace fedsel::numerics
