#pragma once

#include <cstdint>

namespace fedsel {

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream (`stream`, `index`) of a run seeded with `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  return mix64(mix64(mix64(base) ^ stream) ^ (index * 0xd1b54a32d192ed03ULL));
}

namespace streams {
inline constexpr std::uint64_t kEnvironment = 1;
inline constexpr std::uint64_t kAgent = 2;
inline constexpr std::uint64_t kBaseline = 3;
inline constexpr std::uint64_t kOracle = 4;
}  // namespace streams

}  // namespace fedsel
