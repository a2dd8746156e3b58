#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfsobol/estimator.hpp"

namespace mfsobol {

// Inverse of the standard normal CDF, accurate to a few ulps.
// Throws DomainError unless 0 < p < 1.
double normal_inverse_cdf(double p);

// Two-sided normal quantile q(a) = Phi^{-1}(1 - a/2) for 0 < a < 1.
double gaussian_quantile(double a);

// How the target risk alpha is divided between the correction term (alpha_e)
// and the coarse term (alpha_c).
//
//   Theorem     : alpha_c = alpha - alpha_e, so the union bound gives
//                 coverage >= 1 - alpha.
//   PaperFigure : alpha_c = 1 - (alpha + alpha_e) taken verbatim from the
//                 source procedure; reproduces its reported efficiencies but
//                 does not give 1 - alpha coverage.
enum class SplitMode {
  kTheorem,
  kPaperFigure,
};

double alpha_split(double alpha, double alpha_e, SplitMode mode);

// Relative cost of one coarse evaluation (fine = 1).  hierarchical means a
// fine evaluation yields the coarse value at no extra cost.
struct CostModel {
  double rho = 0.5;
  bool hierarchical = false;

  void validate() const;  // 0 < rho < 1
};

// Optimized experiment plan for a target risk alpha and confidence-interval
// length L.  psi_n = ceil(mu * n) is the size of the fine (coupled) sample,
// n the size of the coarse-only sample.  Carries the pilot sigmas it was
// built from so a run can assemble the final interval.
struct Plan {
  double alpha = 0;
  double alpha_e = 0;
  double alpha_c = 0;
  double mu = 0;
  std::int64_t n = 0;
  std::int64_t psi_n = 0;
  double target_length = 0;
  double predicted_cost = 0;
  double classical_cost = 0;
  double efficiency = 0;
  SplitMode split_mode = SplitMode::kTheorem;
  CostModel cost_model;
  double sigma_e = 0;
  double sigma_c = 0;
  double sigma_t_eta = 0;
  // Set when the pilot sigmas were all zero and the cost surface is flat;
  // the plan is then the boundary point of the search domain.
  bool degenerate_pilot = false;
};

struct ConfidenceInterval {
  double center = 0;
  double half_width = 0;
  double nominal_level = 0;
};

// Smallest integer N with
//   q(alpha_e) sigma_e / sqrt(ceil(mu N)) + q(alpha_c) sigma_c / sqrt(N)
//     <= target_length / 2,
// computed as ceil of N*(alpha_e, mu) = (4/L^2)(q(alpha_e) sigma_e/sqrt(mu)
// + q(alpha_c) sigma_c)^2, floored at 1 and bumped if integer rounding
// leaves the half-width above target.
std::int64_t required_sample_size(double alpha_e, double mu,
                                  double target_length, double sigma_e,
                                  double sigma_c, double alpha,
                                  SplitMode mode);

// Planned cost of a run of size n_star: 2 n_star (2 mu + rho) in general,
// 2 n_star (mu + rho) when coarse values come free with fine ones.
double plan_cost(double n_star, double mu, const CostModel& cost_model);

// Cost of reaching the same target with the fine-only estimator:
// 2 (4/L^2) (q(alpha) sigma_t_eta)^2.
double classical_cost(double alpha, double target_length, double sigma_t_eta);

struct OptimizerOptions {
  double mu_min = 1e-3;          // lower bound of the mu search interval
  int grid_points = 200;         // coarse grid resolution per axis
  double rel_tolerance = 1e-6;   // relative cost tolerance of the refinement
};

// Minimizes plan_cost(required size, mu) over alpha_e in its open interval
// and mu in [mu_min, 1]: coarse 200x200 grid (log-spaced alpha_e, linear mu)
// followed by coordinate-wise golden-section refinement.  The optimum and
// the efficiency are independent of target_length by construction.
Plan optimize_plan(double alpha, double target_length,
                   const VarianceEstimates& estimates,
                   const CostModel& cost_model, SplitMode mode,
                   const OptimizerOptions& options = {});

// Interval of Theorem-style form around v_n, using the plan's actual integer
// (n, psi_n).  In Theorem mode the nominal level is exactly 1 - alpha.
ConfidenceInterval confidence_interval(double v_n, const Plan& plan,
                                       double sigma_e, double sigma_c);

struct CurvePoint {
  double alpha = 0;
  double alpha_e = 0;
  double mu = 0;
  double efficiency = 0;
  bool ok = false;
  std::string error;  // set when the per-point optimization failed
};

// optimize_plan applied to each grid value in order.
std::vector<CurvePoint> efficiency_curve(std::span<const double> alpha_grid,
                                         const VarianceEstimates& estimates,
                                         const CostModel& cost_model,
                                         SplitMode mode,
                                         const OptimizerOptions& options = {});

}  // namespace mfsobol
