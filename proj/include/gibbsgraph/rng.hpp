#pragma once

#include <cstdint>
#include <random>

namespace gibbsgraph {

/// Random stream used throughout the library. mt19937_64 is fully specified by
/// the standard, so a seed reproduces the same raw sequence on every platform.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the stream owned by replicate `index` under a master seed.
/// Streams are keyed by index only, so any subset of replicates can be rerun.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

/// Uniform double in [0, 1) carrying 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by multiply-shift (bias below n / 2^64).
inline std::uint32_t uniform_index(Rng& rng, std::uint32_t n) noexcept {
  return static_cast<std::uint32_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace gibbsgraph
