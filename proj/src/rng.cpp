#include "cowalk/rng.hpp"

#include <cmath>
#include <numbers>

namespace cowalk {

SplitMix64 derive_stream(std::uint64_t root, StreamDomain domain, std::uint64_t index) noexcept {
  std::uint64_t key = mix64(root) ^ (static_cast<std::uint64_t>(domain) * 0xD1B54A32D192ED03ULL);
  key = mix64(key) + (index + 1) * 0x9E3779B97F4A7C15ULL;
  return SplitMix64(mix64(key));
}

double standard_normal(SplitMix64& rng) noexcept {
  // 1 - u lies in (0, 1], keeping the log finite.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cowalk
