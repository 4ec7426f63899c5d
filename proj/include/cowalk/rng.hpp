#pragma once

#include <cstdint>
#include <limits>

namespace cowalk {

/// SplitMix64 generator (Steele, Lea & Flood). Satisfies
/// UniformRandomBitGenerator; 64 bits of state, copyable, and cheap to seed,
/// which is what per-replication sub-streams need.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Independent purposes drawn from one root seed. The numeric values are part
/// of the reproducibility contract; do not renumber.
enum class StreamDomain : std::uint64_t {
  path = 1,             // increments of replication i
  completion_zeta = 2,  // zeta_n completing unreached common-move signs
  completion_psi = 3,   // psi_m completing unreached counter-move signs
  probe = 4,            // random history probing in model validation
  synthetic = 5,        // synthetic price series
};

/// The splitmix finalizer, used as a 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Split function: stream(root, domain, index) is seeded with
///   mix64(mix64(mix64(root) ^ domain * 0xD1B54A32D192ED03) + (index + 1) * 0x9E3779B97F4A7C15).
/// Any (domain, index) pair maps to a decorrelated starting state, so streams
/// can be handed to workers in any order.
SplitMix64 derive_stream(std::uint64_t root, StreamDomain domain, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fair +1/-1 draw from the top bit.
inline int fair_sign(SplitMix64& rng) noexcept { return (rng() >> 63) != 0 ? 1 : -1; }

/// Standard normal by Box-Muller (cosine branch only), built from uniform01 so
/// the stream consumption is fixed at two words per draw.
double standard_normal(SplitMix64& rng) noexcept;

}  // namespace cowalk
