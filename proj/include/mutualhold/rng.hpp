#pragma once

#include <cmath>
#include <cstdint>

namespace mutualhold {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, a, b, c).  Simulations index streams by particle and
// step, so results do not depend on evaluation order or thread count,
// and any single draw can be reproduced in isolation.

namespace rng {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream identifiers keep draws for different purposes independent
// even when the (a, b, c) counters coincide.
enum Stream : std::uint64_t {
  kPathGauss = 1,      // Euler increments of the particle system
  kBridgeUniform = 2,  // in-step crossing test
  kInitialState = 3,   // draws from the initial law
  kInitialSmooth = 4,  // auxiliary Gaussian of the smoothed initial law
  kBankGauss = 5,      // Euler increments of the restart bank
  kBankState = 6,      // initial draws of the restart bank
};

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c) {
  std::uint64_t h = mix64(seed ^ (stream * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return mix64(h ^ c);
}

// Uniform on (0,1); never returns 0 so logarithms are safe.
inline double to_unit(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t a,
                      std::uint64_t b, std::uint64_t c = 0) {
  return to_unit(counter_hash(seed, stream, a, b, c));
}

// Standard normal via Box-Muller on two hashed uniforms.
inline double gaussian(std::uint64_t seed, std::uint64_t stream,
                       std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  const double u1 = to_unit(counter_hash(seed, stream, a, b, 2 * c));
  const double u2 = to_unit(counter_hash(seed, stream, a, b, 2 * c + 1));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

// Exponential with the given rate.
inline double exponential(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t a, std::uint64_t b, double rate) {
  return -std::log(to_unit(counter_hash(seed, stream, a, b, 0))) / rate;
}

}  // namespace rng

}  // namespace mutualhold
