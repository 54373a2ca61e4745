#pragma once

// Portable counter-based random numbers.
//
// Seeds: derive_trial_seed(master, trial) = mix64(mix64(master) + (trial + 1) * G)
// where G = 0x9E3779B97F4A7C15 and mix64 is the SplitMix64 finalizer
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//   z ^= z >> 27; z *= 0x94D049BB133111EB;
//   z ^= z >> 31;
// Both steps are bijections of the 64-bit words, so distinct trial indices
// never share a seed under the same master seed.
//
// Streams: Philox4x32-10 (Salmon et al., Random123) keyed by the low/high
// halves of the trial seed. Block i of a stream is philox(ctr = {i_lo, i_hi,
// 0, 0}, key). Each block yields two 64-bit words (w0 = x1:x0, w1 = x3:x2).
// Uniform doubles take the top 53 bits of a word and map to (0, 1) as
// (k + 0.5) * 2^-53. Gaussians use Box-Muller on two consecutive uniforms.

#include <array>
#include <cstdint>

namespace hardedge {

std::uint64_t mix64(std::uint64_t z);

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten-round Philox4x32 bijection.
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal N(0, 1).
  double normal();

  std::uint64_t seed() const { return seed_; }

 private:
  void refill();

  std::uint64_t seed_;
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hardedge
