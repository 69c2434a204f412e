#pragma once

#include <iosfwd>

#include "fedsel/numerics/adam.hpp"
#include "fedsel/numerics/mlp.hpp"

namespace fedsel::numerics {

// Checkpoint text format, version 1 (see docs/checkpoint_format.md):
//
//   fedsel-mlp 1
//   layers <n> <size_0> ... <size_{n-1}>
//   hidden relu|tanh
//   output identity|sigmoid
//   W <layer> <rows> <cols>     followed by <rows> lines of hexfloat entries
//   b <layer> <len>             followed by one line of hexfloat entries
//   end
//
// Hexfloat keeps the round trip bit-exact.
void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(std::istream& in);

//   fedsel-adam 1
//   config <lr> <beta1> <beta2> <epsilon>
//   step <n>
//   <first moment as W/b blocks> <second moment as W/b blocks>
//   end
void write_adam(std::ostream& out, const AdamState& state);
AdamState read_adam(std::istream& in, const MlpSpec& spec);

}  // namespace fedsel::numerics
