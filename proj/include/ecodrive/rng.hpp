#pragma once

#include <cstdint>

namespace ecodrive {

/// SplitMix64 (Steele, Lea & Flood 2014; the seeding generator of
/// xoshiro/xoroshiro). Each draw advances the state by the golden-gamma
/// increment 0x9e3779b97f4a7c15 and applies the standard 64-bit finalizer.
/// The exact sequence is part of the reproducibility contract of scenario
/// generation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Uniform double in [0,1) from the top 53 bits of the next draw.
  double uniform01();

  /// lo + (hi - lo) * uniform01()
  double uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

}  // namespace ecodrive
