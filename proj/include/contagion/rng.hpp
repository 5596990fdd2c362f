#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace contagion {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Stream seed for (master seed, subsystem label, index). Every random
// stream in the toolkit is derived this way:
//   splitmix64(splitmix64(master ^ fnv1a64(label)) + index)
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0) noexcept;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
  return std::generate_canonical<double, 64>(rng);
}

}  // namespace contagion
