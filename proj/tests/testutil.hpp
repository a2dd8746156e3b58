#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mfsobol/planner.hpp"

// Deterministic helpers for building synthetic samples.  mt19937_64 plus
// explicit transforms keeps the draws identical across standard libraries.
namespace testutil {

inline double u01(std::mt19937_64& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1p-53;
}

inline double normal(std::mt19937_64& g) {
  return mfsobol::normal_inverse_cdf(u01(g));
}

inline std::vector<double> normal_vec(std::mt19937_64& g, std::size_t n,
                                      double mean = 0.0, double sd = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = mean + sd * normal(g);
  return v;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testutil
