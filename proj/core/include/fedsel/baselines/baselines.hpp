#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "fedsel/env/types.hpp"

namespace fedsel::baselines {

enum class BaselineKind { kLowCostFirst, kHighQualityFirst, kRandom };

BaselineKind parse_baseline(std::string_view name);  // "lcfa" | "hqfa" | "random"
std::string_view baseline_name(BaselineKind kind);

/// Walks `order` and selects every client whose cost bid still fits in the
/// budget, paying exactly the bid.
env::HybridAction greedy_at_bid(const env::Observation& obs, std::span<const int> order);

/// Cheapest bids first; ties by lower id.
env::HybridAction lcfa_select(const env::Observation& obs);
/// Highest DQI first; ties by lower id.
env::HybridAction hqfa_select(const env::Observation& obs);
/// Uniformly shuffled order.
env::HybridAction random_select(const env::Observation& obs, std::mt19937_64& rng);

class BaselinePolicy {
 public:
  BaselinePolicy(BaselineKind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

  BaselineKind kind() const { return kind_; }
  env::HybridAction act(const env::Observation& obs);

 private:
  BaselineKind kind_;
  std::mt19937_64 rng_;
};

}  // namespace fedsel::baselines
