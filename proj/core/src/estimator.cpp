#include "mfsobol/estimator.hpp"

#include <cmath>
#include <string>

#include "mfsobol/errors.hpp"

namespace mfsobol {

namespace {

// Sums run in fixed index order so results do not depend on how callers
// schedule the surrounding work.

void check_pair(std::span<const double> y, std::span<const double> y_prime) {
  if (y.size() != y_prime.size()) {
    throw LengthMismatch("paired arrays have lengths " +
                         std::to_string(y.size()) + " and " +
                         std::to_string(y_prime.size()));
  }
  if (y.size() < 2) {
    throw LengthMismatch("pick-freeze statistics need at least 2 pairs, got " +
                         std::to_string(y.size()));
  }
}

double sample_sd(std::span<const double> v) {
  const std::size_t n = v.size();
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double sample_cov(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = u.size();
  double mu = 0, mv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += (u[i] - mu) * (v[i] - mv);
  return acc / static_cast<double>(n - 1);
}

std::vector<double> residuals(std::span<const double> y,
                              std::span<const double> y_prime) {
  const PickFreezeStat t = pick_freeze_statistic(y, y_prime);
  const ABRealizations ab = ab_realizations(y, y_prime, t.value);
  std::vector<double> d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    d[i] = (ab.a[i] - 0.5 * ab.b[i]) / ab.var_hat;
  }
  return d;
}

}  // namespace

void PairedSample::validate() const {
  if (yc.has_value() != yc_prime.has_value()) {
    throw InvalidSample("coarse arrays must be both present or both absent");
  }
  if (y.size() != y_prime.size() ||
      (has_coarse() && (yc->size() != y.size() || yc_prime->size() != y.size()))) {
    throw LengthMismatch("paired sample arrays have unequal lengths");
  }
  if (y.size() < 2) {
    throw InvalidSample("paired sample needs at least 2 rows, got " +
                        std::to_string(y.size()));
  }
  auto all_finite = [](const std::vector<double>& v) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  if (!all_finite(y) || !all_finite(y_prime) ||
      (has_coarse() && (!all_finite(*yc) || !all_finite(*yc_prime)))) {
    throw InvalidSample("paired sample contains non-finite entries");
  }
}

PickFreezeStat pick_freeze_statistic(std::span<const double> y,
                                     std::span<const double> y_prime) {
  check_pair(y, y_prime);
  const std::size_t n = y.size();
  double sum_prod = 0, sum_mean = 0, sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_prod += y[i] * y_prime[i];
    sum_mean += 0.5 * (y[i] + y_prime[i]);
    sum_sq += 0.5 * (y[i] * y[i] + y_prime[i] * y_prime[i]);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  PickFreezeStat stat;
  stat.pooled_mean = sum_mean * inv_n;
  stat.numerator = sum_prod * inv_n - stat.pooled_mean * stat.pooled_mean;
  stat.denominator = sum_sq * inv_n - stat.pooled_mean * stat.pooled_mean;
  if (!(stat.denominator > 0)) {
    throw DegenerateSample("pooled sample variance is not positive");
  }
  stat.value = stat.numerator / stat.denominator;
  return stat;
}

ABRealizations ab_realizations(std::span<const double> y,
                               std::span<const double> y_prime, double s_hat) {
  check_pair(y, y_prime);
  const std::size_t n = y.size();
  double sum_mean = 0, sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_mean += 0.5 * (y[i] + y_prime[i]);
    sum_sq += 0.5 * (y[i] * y[i] + y_prime[i] * y_prime[i]);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const double m = sum_mean * inv_n;
  const double var_hat = sum_sq * inv_n - m * m;
  if (!(var_hat > 0)) {
    throw DegenerateSample("pooled sample variance is not positive");
  }
  ABRealizations out;
  out.s_hat = s_hat;
  out.var_hat = var_hat;
  out.a.resize(n);
  out.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dy = y[i] - m;
    const double dyp = y_prime[i] - m;
    out.a[i] = dy * dyp;
    out.b[i] = s_hat * (dy * dy + dyp * dyp);
  }
  return out;
}

SigmaEstimate estimate_sigma_single(const PairedSample& sample,
                                    bool use_coarse) {
  sample.validate();
  if (use_coarse && !sample.has_coarse()) {
    throw MissingCoarse("sample has no coarse arrays");
  }
  const std::vector<double>& y = use_coarse ? *sample.yc : sample.y;
  const std::vector<double>& yp = use_coarse ? *sample.yc_prime : sample.y_prime;
  const PickFreezeStat t = pick_freeze_statistic(y, yp);
  const std::vector<double> d = residuals(y, yp);
  return SigmaEstimate{sample_sd(d), t.value, t.denominator};
}

double estimate_sigma_e(const PairedSample& sample) {
  sample.validate();
  if (!sample.has_coarse()) {
    throw MissingCoarse("sigma_e needs both fine and coarse arrays");
  }
  const std::vector<double> d = residuals(sample.y, sample.y_prime);
  const std::vector<double> dc = residuals(*sample.yc, *sample.yc_prime);
  std::vector<double> diff(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) diff[i] = d[i] - dc[i];
  return sample_sd(diff);
}

VarianceEstimates estimate_all(const PairedSample& sample) {
  sample.validate();
  if (!sample.has_coarse()) {
    throw MissingCoarse("pilot estimation needs coarse arrays");
  }
  const SigmaEstimate fine = estimate_sigma_single(sample, false);
  const SigmaEstimate coarse = estimate_sigma_single(sample, true);
  VarianceEstimates out;
  out.sigma_t_eta = fine.sigma;
  out.sigma_c = coarse.sigma;
  out.sigma_e = estimate_sigma_e(sample);
  out.s_hat = fine.s_hat;
  out.s_c_hat = coarse.s_hat;
  out.var_y = fine.var_hat;
  out.var_yc = coarse.var_hat;
  out.pilot_size = static_cast<std::int64_t>(sample.size());
  return out;
}

SigmaESqDecomposition sigma_e_sq_decomposition(const PairedSample& sample) {
  sample.validate();
  if (!sample.has_coarse()) {
    throw MissingCoarse("decomposition needs coarse arrays");
  }
  const PickFreezeStat tf = pick_freeze_statistic(sample.y, sample.y_prime);
  const PickFreezeStat tc = pick_freeze_statistic(*sample.yc, *sample.yc_prime);
  const ABRealizations fine =
      ab_realizations(sample.y, sample.y_prime, tf.value);
  const ABRealizations coarse =
      ab_realizations(*sample.yc, *sample.yc_prime, tc.value);

  const std::size_t n = sample.size();
  std::vector<double> u(n), uc(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = fine.a[i] - 0.5 * fine.b[i];
    uc[i] = coarse.a[i] - 0.5 * coarse.b[i];
  }

  SigmaESqDecomposition out;
  out.var_a_minus_half_b = sample_cov(u, u);
  out.var_ac_minus_half_bc = sample_cov(uc, uc);
  out.cov_a_ac = sample_cov(fine.a, coarse.a);
  out.cov_a_bc = sample_cov(fine.a, coarse.b);
  out.cov_b_ac = sample_cov(fine.b, coarse.a);
  out.cov_b_bc = sample_cov(fine.b, coarse.b);
  out.var_y = fine.var_hat;
  out.var_yc = coarse.var_hat;
  out.total = out.var_ac_minus_half_bc / (out.var_yc * out.var_yc) +
              out.var_a_minus_half_b / (out.var_y * out.var_y) -
              (2.0 * out.cov_a_ac - (out.cov_a_bc + out.cov_b_ac) +
               0.5 * out.cov_b_bc) /
                  (out.var_y * out.var_yc);
  return out;
}

}  // namespace mfsobol
