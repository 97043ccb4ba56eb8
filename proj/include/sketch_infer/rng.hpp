#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sketch_infer {

/// Engine used throughout. The standard fixes its output sequence, so together
/// with Boost.Random distributions every draw is reproducible across platforms.
using Engine = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable 64-bit hash of a stream label (FNV-1a).
constexpr std::uint64_t stream_id(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based seed derivation: (root, stream, index) -> child seed.
/// Children of distinct (stream, index) pairs are statistically independent,
/// so replicates can be generated in any order or in parallel.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(mix64(root) ^ stream) + index);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                                 std::uint64_t index) noexcept {
  return derive_seed(root, stream_id(stream), index);
}

inline Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

}  // namespace sketch_infer
