#pragma once

#include <cstdint>
#include <random>

namespace prefchoice {

// All randomness in a run comes from one 64-bit Mersenne Twister seeded with
// the run seed. Streams are reproducible for a given build and seed.
using Rng = std::mt19937_64;

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-run seed for replicate `replicate` of grid cell `cell` under one root
// seed: Mix64(Mix64(Mix64(root) ^ cell) ^ replicate). A single simulation is
// cell 0, replicate 0.
constexpr std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t cell,
                                   std::uint64_t replicate) {
  return Mix64(Mix64(Mix64(root) ^ cell) ^ replicate);
}

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be positive.
inline std::uint64_t UniformBelow(Rng& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

}  // namespace prefchoice
