// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "bspd/types.hpp"

namespace bspd {

// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A splittable seed. Child streams are derived by hashing (parent, key), so a
// trial's randomness depends only on (base seed, trial index, stream key) and
// never on which worker ran it or in what order.
class Seed {
 public:
  constexpr explicit Seed(std::uint64_t value = 0) noexcept : value_(value) {}

  constexpr std::uint64_t value() const noexcept { return value_; }

  constexpr Seed split(std::uint64_t key) const noexcept {
    return Seed(splitmix64(splitmix64(value_) ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
  }

  std::mt19937_64 engine() const { return std::mt19937_64(splitmix64(value_)); }

 private:
  std::uint64_t value_;
};

// Named child streams used by one Monte Carlo trial.
namespace stream {
inline constexpr std::uint64_t kPaths = 1;
inline constexpr std::uint64_t kCombiners = 2;
inline constexpr std::uint64_t kNoise = 3;
}  // namespace stream

// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
template <class Engine>
Complex complex_normal(Engine& eng, double variance = 1.0) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const double s = std::sqrt(variance / 2.0);
  const double re = unit(eng);
  const double im = unit(eng);
  return {s * re, s * im};
}

}  // namespace bspd
