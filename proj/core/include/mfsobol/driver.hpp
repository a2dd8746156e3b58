#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "mfsobol/estimator.hpp"
#include "mfsobol/model.hpp"
#include "mfsobol/planner.hpp"
#include "mfsobol/rng.hpp"

namespace mfsobol {

// Top-level substream tags.  Pilot, coarse-only and coupled samples never
// share a substream, which the conservative interval requires.
enum class StreamTag : std::uint64_t {
  kPilot = 1,
  kMainCoarse = 2,
  kMainCoupled = 3,
};

// A pick-freeze design: X_i, Z_i and an independent copy Z_i', plus one
// noise seed per (index, primed/unprimed) evaluation.
struct Design {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> z_prime;
  std::vector<std::array<Seed, 2>> noise_seeds;

  std::size_t size() const { return x.size(); }
};

// Draws a design of size n from the model's input distributions.  Every
// coordinate and seed is a pure function of (master_seed, tag, index, slot),
// so designs are reproducible and order-independent.
Design generate_design(const Model& model, std::size_t n, Seed master_seed,
                       StreamTag tag);

struct PilotRun {
  VarianceEstimates estimates;
  PairedSample sample;
};

// Coupled pilot study: evaluates fine and coarse together at each design
// point (same inputs, same noise seed per role) and runs the variance
// estimators on the resulting paired sample.
PilotRun run_pilot(const Model& model, std::size_t n_pilot, Seed master_seed,
                   int threads = 0);

struct RunReport {
  double v_n = 0;          // variance-reduced index estimate
  double t_n_coarse = 0;   // coarse pick-freeze statistic on the large sample
  double e_n = 0;          // fine-minus-coarse correction; v_n = t_n_coarse + e_n
  ConfidenceInterval interval;
  std::int64_t n = 0;
  std::int64_t psi_n = 0;
  std::int64_t fine_evals = 0;
  std::int64_t coarse_evals = 0;
  double realized_cost = 0;
  Seed master_seed = 0;
  Plan plan;
};

// The full variance-reduced estimation run.  Sample A (size n, fresh
// substream) provides the coarse-only statistic; sample B (size psi_n,
// disjoint substream) provides the coupled fine/coarse pair whose difference
// is the correction.  The interval uses the plan's pilot sigmas at the
// actual integer (n, psi_n).
RunReport run_estimation(const Model& model, const Plan& plan,
                         Seed master_seed, int threads = 0);

// Deterministic parallel map: calls fn(i) for i in [0, n) on up to `threads`
// workers (0 = hardware default).  Results must be written to index-addressed
// slots by the caller; the partition of indices carries no randomness.
void parallel_for_index(std::size_t n, int threads,
                        const std::function<void(std::size_t)>& fn);

}  // namespace mfsobol
