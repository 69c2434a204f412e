#include "fedsel/numerics/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace fedsel::numerics {

AdamState AdamState::for_params(const MlpParams& params, AdamConfig config) {
  AdamState state;
  state.config = config;
  state.first_moment = params;
  state.first_moment.set_zero();
  state.second_moment = state.first_moment;
  return state;
}

namespace {

template <typename Block>
void update_block(Block& param, const Block& grad, Block& m, Block& v, const AdamConfig& c,
                  double correction1, double correction2) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  param.array() -= c.learning_rate * (m.array() / correction1) /
                   ((v.array() / correction2).sqrt() + c.epsilon);
}

}  // namespace

void adam_step(MlpParams& params, const MlpParams& gradients, AdamState& state) {
  if (!params.same_shape(gradients) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment)) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  if (!gradients.all_finite()) throw std::domain_error("adam_step: non-finite gradient");

  state.step += 1;
  const auto& c = state.config;
  const double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update_block(params.weights[l], gradients.weights[l], state.first_moment.weights[l],
                 state.second_moment.weights[l], c, correction1, correction2);
    update_block(params.biases[l], gradients.biases[l], state.first_moment.biases[l],
                 state.second_moment.biases[l], c, correction1, correction2);
  }
}

}  // namespace fedsel::numerics
