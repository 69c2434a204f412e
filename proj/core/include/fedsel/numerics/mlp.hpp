#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace fedsel::numerics {

enum class HiddenActivation { kRelu, kTanh };

// kSigmoid squashes every output into (0, 1); callers rescale to their bounds.
enum class OutputActivation { kIdentity, kSigmoid };

struct MlpSpec {
  std::vector<int> layer_sizes;
  HiddenActivation hidden = HiddenActivation::kRelu;
  OutputActivation output = OutputActivation::kIdentity;

  /// Throws std::invalid_argument unless there are >= 2 layers, all >= 1.
  void validate() const;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t num_affine() const { return layer_sizes.size() - 1; }

  bool operator==(const MlpSpec&) const = default;
};

/// Weights are stored (fan_out x fan_in) so a layer computes W * x + b.
/// Gradients reuse this type.
struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpParams zeros(const MlpSpec& spec);

  bool same_shape(const MlpParams& other) const;
  bool all_finite() const;
  std::size_t parameter_count() const;
  void set_zero();
  // Sum of squares over every entry.
  double squared_norm() const;

  MlpParams& operator+=(const MlpParams& other);
  MlpParams& operator*=(double scale);
};

/// Activation record of one batched forward pass. Columns are batch samples.
struct Tape {
  std::vector<Eigen::MatrixXd> layer_inputs;
  std::vector<Eigen::MatrixXd> pre_activations;
  Eigen::MatrixXd output;
};

struct BackwardResult {
  MlpParams param_gradients;
  Eigen::MatrixXd input_gradient;
};

class Mlp {
 public:
  Mlp() = default;
  Mlp(MlpSpec spec, MlpParams params);

  // He-normal for rectifier nets, Glorot-normal for tanh nets; zero biases.
  static Mlp init(const MlpSpec& spec, std::mt19937_64& rng);

  const MlpSpec& spec() const { return spec_; }
  const MlpParams& params() const { return params_; }
  MlpParams& mutable_params() { return params_; }

  /// input is (input_size x batch). Throws on dimension mismatch.
  Tape forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& input) const;
  Eigen::VectorXd predict(const Eigen::VectorXd& input) const;

  /// Gradients of sum(output .* output_gradient) with respect to every
  /// parameter (summed over the batch) and to the input.
  BackwardResult backward(const Tape& tape, const Eigen::MatrixXd& output_gradient) const;

 private:
  MlpSpec spec_;
  MlpParams params_;
};

MlpParams mlp_init(const MlpSpec& spec, std::mt19937_64& rng);

/// target <- tau * online + (1 - tau) * target, entrywise.
void soft_update(MlpParams& target, const MlpParams& online, double tau);

}  // namespace fedsel::numerics
