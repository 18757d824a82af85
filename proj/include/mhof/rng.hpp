#ifndef MHOF_RNG_HPP
#define MHOF_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mhof {

// Counter-based deterministic sampling: every draw is a pure function of
// (seed, index), so parallel consumers and re-runs see identical streams
// regardless of evaluation order.

/// SplitMix64 output for the index-th element of the stream keyed by seed.
constexpr std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a purpose tag.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64_at(seed, 0x5bf0f3a5ULL + tag);
}

/// Uniform draw in [0, 1) with 53 random bits.
constexpr double uniform01(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(splitmix64_at(seed, index) >> 11) * 0x1.0p-53;
}

/// Standard normal draw; consumes uniform indices 2*index and 2*index+1.
inline double normal01(std::uint64_t seed, std::uint64_t index) {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01(seed, 2 * index);
  const double u2 = uniform01(seed, 2 * index + 1);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace mhof

#endif  // MHOF_RNG_HPP
