#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fedsel::agents {

/// One serial-selection micro-step. `discrete` is a client id or the STOP
/// index (== number of clients); `continuous` holds the normalised payment
/// vector in [0, 1]. `discount` multiplies the bootstrap term: 1 inside a
/// slot, gamma across a slot boundary, 0 when terminal.
struct Transition {
  std::vector<double> state;
  int discrete = 0;
  std::vector<double> continuous;
  double reward = 0.0;
  std::vector<double> next_state;
  std::vector<std::uint8_t> next_selected;
  double next_remaining = 0.0;
  double discount = 1.0;
  bool terminal = false;
};

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

  // i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

  /// Uniform sample of min(n, size) distinct transitions.
  std::vector<const Transition*> sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest item once full
  std::vector<Transition> items_;
};

}  // namespace fedsel::agents
