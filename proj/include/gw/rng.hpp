#pragma once

#include <cstdint>
#include <random>

namespace gw {

// splitmix64 finalizer (Steele, Lea, Flood 2014). Used to derive independent
// per-record seed streams from (master_seed, index) so records can be
// generated in any order, or in parallel, with identical output.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for substream `index` of the stream rooted at `master`.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace gw
