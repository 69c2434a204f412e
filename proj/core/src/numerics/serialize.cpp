#include "fedsel/numerics/serialize.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fedsel::numerics {

namespace {

constexpr int kMlpVersion = 1;
constexpr int kAdamVersion = 1;

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("checkpoint parse error: " + what);
}

void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) fail("expected '" + token + "', got '" + got + "'");
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) fail(std::string("missing ") + what);
  return v;
}

// operator>> does not accept hexfloat portably; strtod does.
double read_double(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) fail("missing number");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') fail("bad number '" + tok + "'");
  return v;
}

void write_double(std::ostream& out, double v) {
  out << std::hexfloat << v << std::defaultfloat;
}

void write_params(std::ostream& out, const MlpParams& p) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto& w = p.weights[l];
    out << "W " << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        if (c) out << ' ';
        write_double(out, w(r, c));
      }
      out << '\n';
    }
    const auto& b = p.biases[l];
    out << "b " << l << ' ' << b.size() << '\n';
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if (i) out << ' ';
      write_double(out, b(i));
    }
    out << '\n';
  }
}

MlpParams read_params(std::istream& in, const MlpSpec& spec) {
  MlpParams p = MlpParams::zeros(spec);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    auto& w = p.weights[l];
    expect_token(in, "W");
    if (read_value<std::size_t>(in, "layer index") != l) fail("layer index out of order");
    const auto rows = read_value<Eigen::Index>(in, "rows");
    const auto cols = read_value<Eigen::Index>(in, "cols");
    if (rows != w.rows() || cols != w.cols()) fail("weight shape does not match layers");
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = read_double(in);
    }
    auto& b = p.biases[l];
    expect_token(in, "b");
    if (read_value<std::size_t>(in, "layer index") != l) fail("layer index out of order");
    if (read_value<Eigen::Index>(in, "bias length") != b.size()) fail("bias length mismatch");
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = read_double(in);
  }
  return p;
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net) {
  const auto& spec = net.spec();
  out << "fedsel-mlp " << kMlpVersion << '\n';
  out << "layers " << spec.layer_sizes.size();
  for (int s : spec.layer_sizes) out << ' ' << s;
  out << '\n';
  out << "hidden " << (spec.hidden == HiddenActivation::kRelu ? "relu" : "tanh") << '\n';
  out << "output " << (spec.output == OutputActivation::kIdentity ? "identity" : "sigmoid")
      << '\n';
  write_params(out, net.params());
  out << "end\n";
}

Mlp read_mlp(std::istream& in) {
  expect_token(in, "fedsel-mlp");
  if (read_value<int>(in, "version") != kMlpVersion) fail("unsupported mlp version");
  expect_token(in, "layers");
  MlpSpec spec;
  const auto n = read_value<std::size_t>(in, "layer count");
  for (std::size_t i = 0; i < n; ++i) spec.layer_sizes.push_back(read_value<int>(in, "layer size"));
  expect_token(in, "hidden");
  const auto hidden = read_value<std::string>(in, "hidden activation");
  if (hidden == "relu") {
    spec.hidden = HiddenActivation::kRelu;
  } else if (hidden == "tanh") {
    spec.hidden = HiddenActivation::kTanh;
  } else {
    fail("unknown hidden activation '" + hidden + "'");
  }
  expect_token(in, "output");
  const auto output = read_value<std::string>(in, "output activation");
  if (output == "identity") {
    spec.output = OutputActivation::kIdentity;
  } else if (output == "sigmoid") {
    spec.output = OutputActivation::kSigmoid;
  } else {
    fail("unknown output activation '" + output + "'");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  MlpParams params = read_params(in, spec);
  expect_token(in, "end");
  return Mlp(std::move(spec), std::move(params));
}

void write_adam(std::ostream& out, const AdamState& state) {
  out << "fedsel-adam " << kAdamVersion << '\n';
  out << "config ";
  write_double(out, state.config.learning_rate);
  out << ' ';
  write_double(out, state.config.beta1);
  out << ' ';
  write_double(out, state.config.beta2);
  out << ' ';
  write_double(out, state.config.epsilon);
  out << '\n' << "step " << state.step << '\n';
  write_params(out, state.first_moment);
  write_params(out, state.second_moment);
  out << "end\n";
}

AdamState read_adam(std::istream& in, const MlpSpec& spec) {
  expect_token(in, "fedsel-adam");
  if (read_value<int>(in, "version") != kAdamVersion) fail("unsupported adam version");
  AdamState state;
  expect_token(in, "config");
  state.config.learning_rate = read_double(in);
  state.config.beta1 = read_double(in);
  state.config.beta2 = read_double(in);
  state.config.epsilon = read_double(in);
  expect_token(in, "step");
  state.step = read_value<std::int64_t>(in, "step");
  if (state.step < 0) fail("negative step counter");
  state.first_moment = read_params(in, spec);
  state.second_moment = read_params(in, spec);
  expect_token(in, "end");
  return state;
}

}  // namespace fedsel::numerics
