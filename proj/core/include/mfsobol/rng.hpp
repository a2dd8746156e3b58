#pragma once

#include <cstdint>

namespace mfsobol {

using Seed = std::uint64_t;

// Counter-based random streams.
//
// Every random quantity in the toolkit is a pure function of a 64-bit stream
// key and a 64-bit counter, so evaluations can be dispatched in any order (or
// concurrently) and still reproduce bit-identical results.
//
// The construction is fixed for reproducibility:
//
//   mix64      = Stafford "mix13" finalizer (as in SplittableRandom)
//   key(master, tag, index, slot)
//              = mix64(mix64(mix64(mix64(master + GAMMA) + tag) + index) + slot)
//   bits(key, counter) = mix64(key + (counter + 1) * GAMMA)
//   u01(key, counter)  = ((bits >> 11) + 0.5) * 2^-53        in (0, 1)
//
// with GAMMA = 0x9E3779B97F4A7C15 (the 64-bit golden ratio).  Distinct
// (tag, index, slot) tuples give independent substreams of one master seed.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr Seed derive_key(Seed master, std::uint64_t tag, std::uint64_t index,
                          std::uint64_t slot) {
  std::uint64_t k = mix64(master + kGoldenGamma);
  k = mix64(k + tag);
  k = mix64(k + index);
  return mix64(k + slot);
}

constexpr std::uint64_t stream_bits(Seed key, std::uint64_t counter) {
  return mix64(key + (counter + 1) * kGoldenGamma);
}

// Uniform double in the open interval (0, 1); safe to feed to an inverse CDF.
constexpr double stream_u01(Seed key, std::uint64_t counter) {
  return (static_cast<double>(stream_bits(key, counter) >> 11) + 0.5) *
         0x1.0p-53;
}

}  // namespace mfsobol
