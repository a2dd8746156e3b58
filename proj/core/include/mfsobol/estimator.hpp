#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mfsobol {

// Pick-freeze realizations: fine outputs (y, y_prime) at (X_i, Z_i) and
// (X_i, Z_i'), optionally paired with coarse-model outputs taken at the
// same inputs.  All present arrays must have the same length n >= 2.
struct PairedSample {
  std::vector<double> y;
  std::vector<double> y_prime;
  std::optional<std::vector<double>> yc;
  std::optional<std::vector<double>> yc_prime;

  std::size_t size() const { return y.size(); }
  bool has_coarse() const { return yc.has_value() && yc_prime.has_value(); }

  // Throws LengthMismatch / InvalidSample on violated invariants:
  // equal lengths, n >= 2, finite entries, coarse arrays both present
  // or both absent.
  void validate() const;
};

// The pick-freeze statistic T together with the empirical moments it is
// built from.  The denominator is the pooled 1/n variance of the sample.
struct PickFreezeStat {
  double value = 0;
  double numerator = 0;
  double denominator = 0;
  double pooled_mean = 0;
};

// Per-realization plug-in versions of the delta-method variables
//   a_i = (y_i - m)(y'_i - m),  b_i = s * ((y_i - m)^2 + (y'_i - m)^2),
// centered at the pooled empirical mean m.  var_hat is the pooled variance.
struct ABRealizations {
  std::vector<double> a;
  std::vector<double> b;
  double s_hat = 0;
  double var_hat = 0;
};

struct SigmaEstimate {
  double sigma = 0;    // asymptotic standard deviation estimate
  double s_hat = 0;    // index estimate used in the plug-in
  double var_hat = 0;  // pooled variance used for normalization
};

// Pilot-study bundle: the three asymptotic standard deviations plus the
// auxiliary moments they were computed from.
struct VarianceEstimates {
  double sigma_t_eta = 0;  // fine-only estimator
  double sigma_c = 0;      // coarse-only estimator
  double sigma_e = 0;      // fine-minus-coarse correction
  double s_hat = 0;
  double s_c_hat = 0;
  double var_y = 0;
  double var_yc = 0;
  std::int64_t pilot_size = 0;
};

// T = [ (1/n) sum y_i y'_i - m^2 ] / [ (1/n) sum (y_i^2 + y'_i^2)/2 - m^2 ]
// with m = (1/n) sum (y_i + y'_i)/2.  All moments use exact 1/n
// normalization.  Throws LengthMismatch (unequal lengths or n < 2) and
// DegenerateSample (denominator <= 0).
PickFreezeStat pick_freeze_statistic(std::span<const double> y,
                                     std::span<const double> y_prime);

// Plug-in realizations of A and B for a given index estimate s_hat.
ABRealizations ab_realizations(std::span<const double> y,
                               std::span<const double> y_prime, double s_hat);

// Plug-in asymptotic standard deviation of the single-stream estimator:
// sample standard deviation (1/(n-1) divisor) of d_i = (a_i - b_i/2)/var_hat.
// use_coarse selects the coarse arrays; throws MissingCoarse if absent.
SigmaEstimate estimate_sigma_single(const PairedSample& sample,
                                    bool use_coarse);

// Plug-in asymptotic standard deviation of the fine-minus-coarse correction:
// sample standard deviation of d_i - d_{c,i}, where each residual stream uses
// its own pooled mean, index estimate and pooled variance.  Equals the
// covariance-expansion form (see sigma_e_sq_decomposition) and is zero
// exactly when the coarse arrays coincide with the fine ones.
double estimate_sigma_e(const PairedSample& sample);

// Runs all three sigma estimators on a coupled pilot sample.
VarianceEstimates estimate_all(const PairedSample& sample);

// Debug view of sigma_e^2 as the explicit covariance expansion
//   var(Ac - Bc/2)/var_yc^2 + var(A - B/2)/var_y^2
//   - [2 cov(A,Ac) - (cov(A,Bc) + cov(B,Ac)) + cov(B,Bc)/2] / (var_y var_yc)
// with 1/(n-1) sample (co)variances.  total agrees with
// estimate_sigma_e(sample)^2 up to floating-point roundoff.
struct SigmaESqDecomposition {
  double var_a_minus_half_b = 0;    // var(A - B/2)
  double var_ac_minus_half_bc = 0;  // var(Ac - Bc/2)
  double cov_a_ac = 0;
  double cov_a_bc = 0;
  double cov_b_ac = 0;
  double cov_b_bc = 0;
  double var_y = 0;   // pooled 1/n variance of the fine sample
  double var_yc = 0;  // pooled 1/n variance of the coarse sample
  double total = 0;   // assembled sigma_e^2
};

SigmaESqDecomposition sigma_e_sq_decomposition(const PairedSample& sample);

}  // namespace mfsobol
