#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfsobol/rng.hpp"

namespace mfsobol {

// Full parameter set of one Monte-Carlo price evaluation: the six uncertain
// inputs (nu0 = X, the rest = Z) plus the fixed contract and discretization
// parameters.
struct HestonParams {
  double nu0 = 0.225;    // initial variance
  double kappa = 1.5;    // variance mean-reversion rate
  double theta = 0.21;   // long-run variance
  double corr = 0;       // correlation of the two Brownian drivers, in [-1, 1]
  double xi = 0.2;       // volatility of variance
  double rate = 0.59;    // risk-free rate

  double s0 = 60.0;
  double maturity = 0.25;  // years
  double strike = 30.0;
  double h = 0.001;        // Euler timestep; maturity/h must be integral
  std::int64_t m_fine = 10000;   // paths of the fine evaluator
  std::int64_t m_coarse = 5000;  // paths of the coarse evaluator

  // Update the variance additively (matching the continuous dynamics) instead
  // of with the multiplicative recursion used by default.  Sanity-comparison
  // switch only.
  bool additive_nu = false;

  std::int64_t steps() const;
  void validate() const;  // throws InvalidParams
};

// Simulates n_paths Euler paths of (S, nu) and returns the terminal prices.
// Per step the recursions are
//   S   <- S  * (1 + rate h + sqrt(nu+) sqrt(h) dW1)
//   nu  <- nu * (1 + kappa (theta - nu) h
//                  + xi sqrt(nu+) sqrt(h) (corr dW1 + sqrt(1-corr^2) dW2))
// with sqrt(nu+) = sqrt(max(nu, 0)).  The increment pair of path j, step t
// is drawn from the seeded stream at counters (j*steps + t)*2 and
// (j*steps + t)*2 + 1 (path-major order), so a simulation of m < n paths
// consumes exactly the draws of the first m paths.
std::vector<double> heston_terminal_prices(const HestonParams& params,
                                           std::int64_t n_paths,
                                           Seed noise_seed);

// Discounted mean call payoff over the first n_paths entries of terminal
// prices produced with these params.
double heston_discounted_call_mean(const HestonParams& params,
                                   std::span<const double> terminal_prices,
                                   std::int64_t n_paths);

}  // namespace mfsobol
