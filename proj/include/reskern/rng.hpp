#pragma once

#include <cstdint>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

// Deterministic randomness utilities.
//
// The engine is std::mt19937_64, whose output sequence is pinned by the C++
// standard, so seeded results are bit-identical everywhere. The stdlib
// *distributions* are implementation-defined and therefore not used; bounded
// integers, subset sampling and normal deviates are derived below with fixed
// algorithms. These algorithms are part of the serialization/reproducibility
// contract and must not change between releases.

namespace reskern::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child-stream seed: mix64(master XOR (slot * 2^32 + index)).
/// `slot` is the layer index for ensemble streams; other consumers use the
/// reserved slot constants below (all >= 2^16, ensemble layers stay small,
/// so streams can never collide).
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t slot,
                                   std::uint64_t index) {
  return mix64(master ^ ((slot << 32) + index));
}

// Reserved non-layer stream slots.
inline constexpr std::uint64_t kSlotKmeansRestart = 0x4B4D;  // "KM"
inline constexpr std::uint64_t kSlotRepetition = 0x5250;     // "RP"
inline constexpr std::uint64_t kSlotBlobs = 0x424C;          // "BL"

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Unbiased uniform integer in [0, bound), bound >= 1. Rejection sampling on
/// the raw 64-bit stream.
inline std::uint64_t below(Engine& g, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal deviate, Box-Muller (cosine branch; one pair of uniforms
/// per deviate, the sine half is discarded to keep the draw stateless).
inline double normal(Engine& g) {
  double u1;
  do {
    u1 = uniform01(g);
  } while (u1 == 0.0);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// k distinct indices from {0..n-1}, uniform without replacement.
/// Partial Fisher-Yates over an index table; selection order is preserved.
inline std::vector<std::size_t> sample_without_replacement(Engine& g, std::size_t n,
                                                           std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(g, n - i));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

}  // namespace reskern::rng
