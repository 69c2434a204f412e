#include "fedsel/market/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedsel::market {

namespace {
constexpr double kSumTolerance = 1e-9;
}

LabelDistribution::LabelDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) throw std::invalid_argument("LabelDistribution: no classes");
  double total = 0.0;
  for (double p : probabilities_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("LabelDistribution: entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw std::invalid_argument("LabelDistribution: entries must sum to 1");
  }
}

LabelDistribution LabelDistribution::uniform(std::size_t classes) {
  if (classes == 0) throw std::invalid_argument("LabelDistribution: no classes");
  return LabelDistribution(std::vector<double>(classes, 1.0 / static_cast<double>(classes)));
}

LabelDistribution LabelDistribution::one_hot(std::size_t classes, std::size_t label) {
  if (label >= classes) throw std::invalid_argument("LabelDistribution: label out of range");
  std::vector<double> p(classes, 0.0);
  p[label] = 1.0;
  return LabelDistribution(std::move(p));
}

double emd(const LabelDistribution& actual, const LabelDistribution& reference) {
  if (actual.classes() != reference.classes()) {
    throw std::invalid_argument("emd: class count mismatch");
  }
  // Neumaier-compensated sum: the result is the correctly rounded total for
  // the class counts used here, so e.g. one-hot vs uniform-10 is exactly 1.8.
  double total = 0.0;
  double carry = 0.0;
  for (std::size_t y = 0; y < actual.classes(); ++y) {
    const double term = std::abs(actual[y] - reference[y]);
    const double next = total + term;
    carry += std::abs(total) >= term ? (total - next) + term : (term - next) + total;
    total = next;
  }
  return total + carry;
}

LabelDistribution merge(std::span<const double> weights,
                        std::span<const LabelDistribution> parts) {
  if (weights.size() != parts.size() || parts.empty()) {
    throw std::invalid_argument("merge: need one weight per distribution");
  }
  const std::size_t classes = parts.front().classes();
  double total_weight = 0.0;
  std::vector<double> mixed(classes, 0.0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].classes() != classes) throw std::invalid_argument("merge: class count mismatch");
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("merge: negative weight");
    total_weight += weights[i];
    for (std::size_t y = 0; y < classes; ++y) mixed[y] += weights[i] * parts[i][y];
  }
  if (!(total_weight > 0.0)) throw std::invalid_argument("merge: zero total weight");
  for (double& m : mixed) m /= total_weight;
  // Renormalise away the rounding drift of the weighted sum.
  const double sum = std::accumulate(mixed.begin(), mixed.end(), 0.0);
  for (double& m : mixed) m /= sum;
  return LabelDistribution(std::move(mixed));
}

LabelDistribution synth_distribution(double target_emd, const LabelDistribution& reference,
                                     std::mt19937_64& rng) {
  if (!(target_emd >= 0.0)) throw std::invalid_argument("synth_distribution: negative target");
  const std::size_t classes = reference.classes();
  const auto ref = reference.probabilities();
  const double min_mass = *std::min_element(ref.begin(), ref.end());
  if (target_emd > 2.0 * (1.0 - min_mass) + 1e-12) {
    throw std::invalid_argument("synth_distribution: target emd is infeasible for reference");
  }

  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> p(ref.begin(), ref.end());
  if (target_emd == 0.0) return reference;

  double to_move = target_emd / 2.0;
  if (1.0 - ref[order.front()] < to_move) {
    // Promote the first label (in visiting order) with the least mass.
    auto it = std::min_element(order.begin(), order.end(),
                               [&](std::size_t a, std::size_t b) { return ref[a] < ref[b]; });
    std::rotate(order.begin(), it, it + 1);
  }
  const std::size_t dominant = order.front();
  for (std::size_t k = 1; k < classes && to_move > 0.0; ++k) {
    const std::size_t label = order[k];
    const double take = std::min(to_move, p[label]);
    p[label] -= take;
    p[dominant] += take;
    to_move -= take;
  }
  for (double& x : p) x = std::max(x, 0.0);
  return LabelDistribution(std::move(p));
}

}  // namespace fedsel::market
