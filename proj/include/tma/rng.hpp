#pragma once

#include <array>
#include <cstdint>

namespace tma {

/// SplitMix64 (Steele/Lea/Flood). Used only for seeding and substream
/// derivation, never as the sampling generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// One SplitMix64 step as a stateless 64-bit scrambler.
inline std::uint64_t scramble64(std::uint64_t x) { return SplitMix64(x).next(); }

// Substream derivation rule
// -------------------------
// Stream k of run seed s is seeded with  scramble64(s ^ scramble64(k)).
// Both scrambles are full-avalanche bijections, so distinct (s, k) pairs land
// at unrelated points of the state space and substreams can be consumed in
// any order, or concurrently, without observing each other. Every randomized
// routine in this library takes (seed, stream) through this rule, which is
// what makes replicate-parallel Monte Carlo reproducible independent of
// thread scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return scramble64(seed ^ scramble64(stream));
}

/// Fixed stream ids. Replicate r of a Monte Carlo routine uses
/// kStreamReplicateBase + r; ids below the base are reserved singletons.
inline constexpr std::uint64_t kStreamMain = 0;        // e_1, e_2, ...
inline constexpr std::uint64_t kStreamPresample = 1;   // e_0, e_{-1}, ...
inline constexpr std::uint64_t kStreamDelta = 2;       // contraction-delta MC
inline constexpr std::uint64_t kStreamAux = 3;         // misc MC fallbacks
inline constexpr std::uint64_t kStreamReplicateBase = 16;

/// xoshiro256++ (Blackman/Vigna), seeded via SplitMix64 state expansion.
class Xoshiro256PlusPlus {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256PlusPlus(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double strictly inside (0, 1): 53 random bits centered on the
  /// grid, so 0 and 1 are unreachable and inverse-CDF transforms stay finite.
  double uniform01() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

/// Generator positioned at substream `stream` of run seed `seed`.
inline Xoshiro256PlusPlus substream_rng(std::uint64_t seed, std::uint64_t stream) {
  return Xoshiro256PlusPlus(derive_stream_seed(seed, stream));
}

}  // namespace tma
