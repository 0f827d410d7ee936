#pragma once

#include <cstdint>

namespace ccrl {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used as the fixed hash for
// deriving per-epoch and per-episode seeds, so parallel rollouts reproduce the
// serial ones exactly.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for stream `index` derived from `base`. derive_seed(epoch_seed, k) is
// the published per-episode splitting rule; derive_seed(master_seed, m + 1)
// yields the seed of epoch m, and derive_seed(master_seed, 0) seeds the
// policy initialization.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(splitmix64(base) ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

}  // namespace ccrl
