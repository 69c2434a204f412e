#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace fedsel::market {

/// Per-class probability vector. Entries are non-negative and sum to 1
/// within 1e-9; construction throws std::invalid_argument otherwise.
class LabelDistribution {
 public:
  LabelDistribution() = default;
  explicit LabelDistribution(std::vector<double> probabilities);

  static LabelDistribution uniform(std::size_t classes);
  static LabelDistribution one_hot(std::size_t classes, std::size_t label);

  std::size_t classes() const { return probabilities_.size(); }
  double operator[](std::size_t i) const { return probabilities_[i]; }
  std::span<const double> probabilities() const { return probabilities_; }

  bool operator==(const LabelDistribution&) const = default;

 private:
  std::vector<double> probabilities_;
};

/// Earth mover's distance as the L1 gap between label histograms.
double emd(const LabelDistribution& actual, const LabelDistribution& reference);

/// Size-weighted mixture of (weight, distribution) pairs. Weights must be
/// non-negative with a positive total.
LabelDistribution merge(std::span<const double> weights,
                        std::span<const LabelDistribution> parts);

/// Builds a distribution whose emd against `reference` equals `target_emd`.
///
/// Class labels are visited in an rng-drawn order. The first label (or, if
/// it cannot absorb enough mass, the label with the least reference mass)
/// becomes dominant; mass is then drained from the remaining labels in
/// visiting order and piled onto it until the L1 gap reaches the target.
/// Throws std::invalid_argument for a negative target or one above
/// 2 * (1 - min reference mass).
LabelDistribution synth_distribution(double target_emd, const LabelDistribution& reference,
                                     std::mt19937_64& rng);

}  // namespace fedsel::market
