#include "fedsel/numerics/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fedsel::numerics {

namespace {

Eigen::MatrixXd apply_hidden(HiddenActivation act, const Eigen::MatrixXd& z) {
  if (act == HiddenActivation::kRelu) return z.cwiseMax(0.0);
  return z.array().tanh().matrix();
}

Eigen::MatrixXd apply_output(OutputActivation act, const Eigen::MatrixXd& z) {
  if (act == OutputActivation::kIdentity) return z;
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

// d(activation)/dz evaluated from the pre-activation z, multiplied into grad.
void scale_by_hidden_derivative(HiddenActivation act, const Eigen::MatrixXd& z,
                                Eigen::MatrixXd& grad) {
  if (act == HiddenActivation::kRelu) {
    grad.array() *= (z.array() > 0.0).cast<double>();
  } else {
    grad.array() *= 1.0 - z.array().tanh().square();
  }
}

void scale_by_output_derivative(OutputActivation act, const Eigen::MatrixXd& output,
                                Eigen::MatrixXd& grad) {
  if (act == OutputActivation::kSigmoid) {
    grad.array() *= output.array() * (1.0 - output.array());
  }
}

}  // namespace

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("MlpSpec needs at least an input and an output layer");
  }
  for (int size : layer_sizes) {
    if (size < 1) throw std::invalid_argument("MlpSpec layer size must be >= 1");
  }
}

MlpParams MlpParams::zeros(const MlpSpec& spec) {
  spec.validate();
  MlpParams p;
  for (std::size_t l = 0; l < spec.num_affine(); ++l) {
    p.weights.push_back(Eigen::MatrixXd::Zero(spec.layer_sizes[l + 1], spec.layer_sizes[l]));
    p.biases.push_back(Eigen::VectorXd::Zero(spec.layer_sizes[l + 1]));
  }
  return p;
}

bool MlpParams::same_shape(const MlpParams& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() ||
        weights[l].cols() != other.weights[l].cols() ||
        biases[l].size() != other.biases[l].size()) {
      return false;
    }
  }
  return true;
}

bool MlpParams::all_finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return n;
}

void MlpParams::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

double MlpParams::squared_norm() const {
  double s = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    s += weights[l].squaredNorm() + biases[l].squaredNorm();
  }
  return s;
}

MlpParams& MlpParams::operator+=(const MlpParams& other) {
  if (!same_shape(other)) throw std::invalid_argument("MlpParams shape mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

MlpParams& MlpParams::operator*=(double scale) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= scale;
    biases[l] *= scale;
  }
  return *this;
}

Mlp::Mlp(MlpSpec spec, MlpParams params) : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.validate();
  if (!params_.same_shape(MlpParams::zeros(spec_))) {
    throw std::invalid_argument("MlpParams do not match MlpSpec");
  }
}

MlpParams mlp_init(const MlpSpec& spec, std::mt19937_64& rng) {
  MlpParams p = MlpParams::zeros(spec);
  for (std::size_t l = 0; l < spec.num_affine(); ++l) {
    const double fan_in = spec.layer_sizes[l];
    const double fan_out = spec.layer_sizes[l + 1];
    const double variance = spec.hidden == HiddenActivation::kRelu
                                ? 2.0 / fan_in
                                : 2.0 / (fan_in + fan_out);
    std::normal_distribution<double> normal(0.0, std::sqrt(variance));
    auto& w = p.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = normal(rng);
    }
  }
  return p;
}

Mlp Mlp::init(const MlpSpec& spec, std::mt19937_64& rng) {
  return Mlp(spec, mlp_init(spec, rng));
}

Tape Mlp::forward(const Eigen::MatrixXd& input) const {
  if (input.rows() != spec_.input_size()) {
    throw std::invalid_argument("mlp forward: input has " + std::to_string(input.rows()) +
                                " rows, expected " + std::to_string(spec_.input_size()));
  }
  const std::size_t layers = spec_.num_affine();
  Tape tape;
  tape.layer_inputs.reserve(layers);
  tape.pre_activations.reserve(layers);
  Eigen::MatrixXd x = input;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = params_.weights[l] * x;
    z.colwise() += params_.biases[l];
    tape.layer_inputs.push_back(std::move(x));
    x = (l + 1 < layers) ? apply_hidden(spec_.hidden, z) : apply_output(spec_.output, z);
    tape.pre_activations.push_back(std::move(z));
  }
  tape.output = std::move(x);
  return tape;
}

Eigen::MatrixXd Mlp::predict(const Eigen::MatrixXd& input) const {
  return forward(input).output;
}

Eigen::VectorXd Mlp::predict(const Eigen::VectorXd& input) const {
  return forward(Eigen::MatrixXd(input)).output.col(0);
}

BackwardResult Mlp::backward(const Tape& tape, const Eigen::MatrixXd& output_gradient) const {
  const std::size_t layers = spec_.num_affine();
  if (tape.layer_inputs.size() != layers || tape.pre_activations.size() != layers) {
    throw std::invalid_argument("mlp backward: tape does not match network depth");
  }
  const Eigen::Index batch = tape.output.cols();
  if (output_gradient.rows() != spec_.output_size() || output_gradient.cols() != batch) {
    throw std::invalid_argument("mlp backward: output gradient shape mismatch");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (tape.layer_inputs[l].rows() != params_.weights[l].cols() ||
        tape.pre_activations[l].rows() != params_.weights[l].rows()) {
      throw std::invalid_argument("mlp backward: tape does not match parameters");
    }
  }

  BackwardResult result;
  result.param_gradients = MlpParams::zeros(spec_);
  Eigen::MatrixXd delta = output_gradient;
  scale_by_output_derivative(spec_.output, tape.output, delta);
  for (std::size_t i = layers; i-- > 0;) {
    result.param_gradients.weights[i].noalias() = delta * tape.layer_inputs[i].transpose();
    result.param_gradients.biases[i] = delta.rowwise().sum();
    Eigen::MatrixXd upstream = params_.weights[i].transpose() * delta;
    if (i > 0) scale_by_hidden_derivative(spec_.hidden, tape.pre_activations[i - 1], upstream);
    delta = std::move(upstream);
  }
  result.input_gradient = std::move(delta);
  return result;
}

void soft_update(MlpParams& target, const MlpParams& online, double tau) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: shape mismatch");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must be in (0, 1]");
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = tau * online.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * online.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

}  // namespace fedsel::numerics
