#include "mfsobol/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mfsobol/errors.hpp"

namespace mfsobol {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Rational initial guess for Phi^{-1} (Acklam's approximation), relative
// error below 1.2e-9 everywhere.
double inverse_cdf_guess(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_inverse_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_inverse_cdf requires 0 < p < 1, got " +
                      std::to_string(p));
  }
  double x = inverse_cdf_guess(p);
  // One Halley step against the erfc-based CDF brings the guess to a few ulps.
  const double err = std_normal_cdf(x) - p;
  const double u = err * kSqrt2Pi * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double gaussian_quantile(double a) {
  if (!(a > 0.0 && a < 1.0)) {
    throw DomainError("gaussian_quantile requires 0 < a < 1, got " +
                      std::to_string(a));
  }
  // Phi^{-1}(1 - a/2) = -Phi^{-1}(a/2); the lower-tail form keeps full
  // precision for small a.
  return -normal_inverse_cdf(0.5 * a);
}

double alpha_split(double alpha, double alpha_e, SplitMode mode) {
  if (mode == SplitMode::kTheorem) {
    if (!(alpha > 0.0 && alpha < 1.0 && alpha_e > 0.0 && alpha_e < alpha)) {
      throw DomainError("theorem split needs 0 < alpha_e < alpha < 1");
    }
    return alpha - alpha_e;
  }
  if (!(alpha > 0.0 && alpha_e > 0.0 && alpha + alpha_e < 1.0)) {
    throw DomainError("paper-figure split needs alpha_e > 0, alpha + alpha_e < 1");
  }
  return 1.0 - (alpha + alpha_e);
}

void CostModel::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw DomainError("cost model needs 0 < rho < 1, got " +
                      std::to_string(rho));
  }
}

namespace {

void check_sigmas(double sigma_e, double sigma_c) {
  if (!(sigma_e >= 0.0) || !(sigma_c >= 0.0) || !std::isfinite(sigma_e) ||
      !std::isfinite(sigma_c)) {
    throw DomainError("sigma estimates must be finite and nonnegative");
  }
}

// Real-valued N*(alpha_e, mu) before integer rounding.
double required_size_real(double alpha_e, double mu, double target_length,
                          double sigma_e, double sigma_c, double alpha,
                          SplitMode mode) {
  const double alpha_c = alpha_split(alpha, alpha_e, mode);
  const double term = gaussian_quantile(alpha_e) * sigma_e / std::sqrt(mu) +
                      gaussian_quantile(alpha_c) * sigma_c;
  return 4.0 / (target_length * target_length) * term * term;
}

double half_width_at(std::int64_t n, std::int64_t psi_n, double q_e,
                     double q_c, double sigma_e, double sigma_c) {
  return q_e * sigma_e / std::sqrt(static_cast<double>(psi_n)) +
         q_c * sigma_c / std::sqrt(static_cast<double>(n));
}

std::int64_t psi_of(double mu, std::int64_t n) {
  const auto psi = static_cast<std::int64_t>(
      std::ceil(mu * static_cast<double>(n)));
  return std::clamp<std::int64_t>(psi, 1, n);
}

}  // namespace

std::int64_t required_sample_size(double alpha_e, double mu,
                                  double target_length, double sigma_e,
                                  double sigma_c, double alpha,
                                  SplitMode mode) {
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw DomainError("mu must lie in (0, 1]");
  }
  if (!(target_length > 0.0)) {
    throw DomainError("target length must be positive");
  }
  check_sigmas(sigma_e, sigma_c);
  const double alpha_c = alpha_split(alpha, alpha_e, mode);
  const double n_star =
      required_size_real(alpha_e, mu, target_length, sigma_e, sigma_c, alpha,
                         mode);
  std::int64_t n = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(n_star)));
  const double q_e = gaussian_quantile(alpha_e);
  const double q_c = gaussian_quantile(alpha_c);
  // ceil(mu n) >= mu N* makes the target length feasible; the bump loop only
  // absorbs floating-point edge cases of the ceiling arithmetic.
  for (int i = 0; i < 64; ++i) {
    if (half_width_at(n, psi_of(mu, n), q_e, q_c, sigma_e, sigma_c) <=
        0.5 * target_length + 1e-12) {
      break;
    }
    ++n;
  }
  return n;
}

double plan_cost(double n_star, double mu, const CostModel& cost_model) {
  if (!(n_star > 0.0)) {
    throw DomainError("plan_cost needs n_star > 0");
  }
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw DomainError("mu must lie in (0, 1]");
  }
  cost_model.validate();
  const double per_index =
      cost_model.hierarchical ? mu + cost_model.rho : 2.0 * mu + cost_model.rho;
  return 2.0 * n_star * per_index;
}

double classical_cost(double alpha, double target_length, double sigma_t_eta) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1)");
  }
  if (!(target_length > 0.0)) {
    throw DomainError("target length must be positive");
  }
  if (!(sigma_t_eta >= 0.0)) {
    throw DomainError("sigma_t_eta must be nonnegative");
  }
  const double q = gaussian_quantile(alpha);
  return 2.0 * 4.0 / (target_length * target_length) * q * sigma_t_eta * q *
         sigma_t_eta;
}

namespace {

// Objective with the target length scaled out:
//   unit_cost(alpha_e, mu) = (q(alpha_e) sigma_e / sqrt(mu)
//                             + q(alpha_c) sigma_c)^2 * cost factor.
// The full cost is (8/L^2) * unit_cost, so argmin and efficiency never see L.
struct UnitObjective {
  double alpha;
  double sigma_e;
  double sigma_c;
  CostModel cost_model;
  SplitMode mode;

  double operator()(double alpha_e, double mu) const {
    const double alpha_c = alpha_split(alpha, alpha_e, mode);
    const double term =
        gaussian_quantile(alpha_e) * sigma_e / std::sqrt(mu) +
        gaussian_quantile(alpha_c) * sigma_c;
    const double per_index = cost_model.hierarchical
                                 ? mu + cost_model.rho
                                 : 2.0 * mu + cost_model.rho;
    return term * term * per_index;
  }
};

struct BestPoint {
  double alpha_e = 0;
  double mu = 0;
  double cost = std::numeric_limits<double>::infinity();
};

}  // namespace

Plan optimize_plan(double alpha, double target_length,
                   const VarianceEstimates& estimates,
                   const CostModel& cost_model, SplitMode mode,
                   const OptimizerOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1)");
  }
  if (!(target_length > 0.0)) {
    throw DomainError("target length must be positive");
  }
  cost_model.validate();
  check_sigmas(estimates.sigma_e, estimates.sigma_c);
  if (!(options.mu_min > 0.0 && options.mu_min <= 1.0)) {
    throw DomainError("mu_min must lie in (0, 1]");
  }

  // alpha_e search interval (open at both ends in exact arithmetic).
  const double interval_top = mode == SplitMode::kTheorem ? alpha : 1.0 - alpha;
  constexpr double kEdge = 1e-6;
  const double ae_lo = interval_top * kEdge;
  const double ae_hi = interval_top * (1.0 - kEdge);

  Plan plan;
  plan.alpha = alpha;
  plan.target_length = target_length;
  plan.split_mode = mode;
  plan.cost_model = cost_model;
  plan.sigma_e = estimates.sigma_e;
  plan.sigma_c = estimates.sigma_c;
  plan.sigma_t_eta = estimates.sigma_t_eta;

  const double unit_classical =
      gaussian_quantile(alpha) * estimates.sigma_t_eta *
      gaussian_quantile(alpha) * estimates.sigma_t_eta;
  plan.classical_cost = classical_cost(alpha, target_length,
                                       estimates.sigma_t_eta);

  if (estimates.sigma_e == 0.0 && estimates.sigma_c == 0.0) {
    // Flat cost surface: any point is optimal.  Return the boundary plan.
    plan.degenerate_pilot = true;
    plan.alpha_e = ae_lo;
    plan.alpha_c = alpha_split(alpha, ae_lo, mode);
    plan.mu = options.mu_min;
    plan.n = 1;
    plan.psi_n = 1;
    plan.predicted_cost = 0.0;
    plan.efficiency =
        unit_classical > 0.0 ? 1.0
                             : std::numeric_limits<double>::quiet_NaN();
    return plan;
  }

  const UnitObjective objective{alpha, estimates.sigma_e, estimates.sigma_c,
                                cost_model, mode};

  // Stage 1: coarse grid, log-spaced in alpha_e, linear in mu.
  const int k = std::max(2, options.grid_points);
  const double log_lo = std::log(ae_lo);
  const double log_hi = std::log(ae_hi);
  std::vector<double> ae_grid(k), mu_grid(k);
  for (int i = 0; i < k; ++i) {
    ae_grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (k - 1));
    mu_grid[i] =
        options.mu_min + (1.0 - options.mu_min) * i / (k - 1);
  }
  ae_grid.front() = ae_lo;
  ae_grid.back() = ae_hi;
  mu_grid.front() = options.mu_min;
  mu_grid.back() = 1.0;

  BestPoint best;
  int bi = 0, bj = 0;
  for (int i = 0; i < k; ++i) {
    const double ae = ae_grid[i];
    // q(alpha_e) and q(alpha_c) depend on alpha_e only; hoist them.
    const double alpha_c = alpha_split(alpha, ae, mode);
    const double qe_sig = gaussian_quantile(ae) * estimates.sigma_e;
    const double qc_sig = gaussian_quantile(alpha_c) * estimates.sigma_c;
    for (int j = 0; j < k; ++j) {
      const double mu = mu_grid[j];
      const double term = qe_sig / std::sqrt(mu) + qc_sig;
      const double per_index = cost_model.hierarchical
                                   ? mu + cost_model.rho
                                   : 2.0 * mu + cost_model.rho;
      const double c = term * term * per_index;
      if (c < best.cost) {
        best.cost = c;
        best.alpha_e = ae;
        best.mu = mu;
        bi = i;
        bj = j;
      }
    }
  }

  // Stage 2: coordinate-wise golden-section refinement inside the brackets
  // formed by the neighboring grid points.
  constexpr double kInvPhi = 0.6180339887498949;
  double ae_a = ae_grid[std::max(0, bi - 1)];
  double ae_b = ae_grid[std::min(k - 1, bi + 1)];
  double mu_a = mu_grid[std::max(0, bj - 1)];
  double mu_b = mu_grid[std::min(k - 1, bj + 1)];

  auto refine_1d = [&](auto f, double a, double b, double seed_x) {
    double best_x = seed_x;
    double best_f = f(seed_x);
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 120; ++it) {
      if (f1 < best_f) {
        best_f = f1;
        best_x = x1;
      }
      if (f2 < best_f) {
        best_f = f2;
        best_x = x2;
      }
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = f(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = f(x2);
      }
      if (b - a <= options.rel_tolerance * std::max(1e-30, 0.5 * (a + b))) {
        break;
      }
    }
    const double fa = f(a), fb = f(b);
    if (fa < best_f) {
      best_f = fa;
      best_x = a;
    }
    if (fb < best_f) {
      best_f = fb;
      best_x = b;
    }
    return std::pair<double, double>(best_x, best_f);
  };

  double prev_cost = best.cost;
  for (int sweep = 0; sweep < 40; ++sweep) {
    auto [ae_new, cost_ae] = refine_1d(
        [&](double ae) { return objective(ae, best.mu); }, ae_a, ae_b,
        best.alpha_e);
    if (cost_ae < best.cost) {
      best.cost = cost_ae;
      best.alpha_e = ae_new;
    }
    auto [mu_new, cost_mu] = refine_1d(
        [&](double mu) { return objective(best.alpha_e, mu); }, mu_a, mu_b,
        best.mu);
    if (cost_mu < best.cost) {
      best.cost = cost_mu;
      best.mu = mu_new;
    }
    if (prev_cost - best.cost <=
        options.rel_tolerance * std::max(1e-30, prev_cost)) {
      break;
    }
    prev_cost = best.cost;
  }

  plan.alpha_e = best.alpha_e;
  plan.alpha_c = alpha_split(alpha, best.alpha_e, mode);
  plan.mu = best.mu;
  plan.n = required_sample_size(best.alpha_e, best.mu, target_length,
                                estimates.sigma_e, estimates.sigma_c, alpha,
                                mode);
  plan.psi_n = psi_of(best.mu, plan.n);
  const double n_star_real =
      required_size_real(best.alpha_e, best.mu, target_length,
                         estimates.sigma_e, estimates.sigma_c, alpha, mode);
  plan.predicted_cost =
      n_star_real > 0.0 ? plan_cost(n_star_real, best.mu, cost_model) : 0.0;
  // efficiency = 1 - predicted/classical evaluated on unit quantities, so it
  // is bit-identical for every target length.
  plan.efficiency = unit_classical > 0.0
                        ? 1.0 - best.cost / unit_classical
                        : std::numeric_limits<double>::quiet_NaN();
  return plan;
}

ConfidenceInterval confidence_interval(double v_n, const Plan& plan,
                                       double sigma_e, double sigma_c) {
  check_sigmas(sigma_e, sigma_c);
  if (plan.n < 1 || plan.psi_n < 1) {
    throw DomainError("plan has empty sample sizes");
  }
  ConfidenceInterval ci;
  ci.center = v_n;
  ci.half_width = half_width_at(plan.n, plan.psi_n,
                                gaussian_quantile(plan.alpha_e),
                                gaussian_quantile(plan.alpha_c), sigma_e,
                                sigma_c);
  // In theorem mode alpha_e + alpha_c = alpha by construction; use alpha
  // directly so the nominal level is exact.
  ci.nominal_level = plan.split_mode == SplitMode::kTheorem
                         ? 1.0 - plan.alpha
                         : 1.0 - (plan.alpha_e + plan.alpha_c);
  return ci;
}

std::vector<CurvePoint> efficiency_curve(std::span<const double> alpha_grid,
                                         const VarianceEstimates& estimates,
                                         const CostModel& cost_model,
                                         SplitMode mode,
                                         const OptimizerOptions& options) {
  std::vector<CurvePoint> out(alpha_grid.size());
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    CurvePoint& pt = out[i];
    pt.alpha = alpha_grid[i];
    try {
      // Target length cancels from the efficiency; any positive value works.
      const Plan plan =
          optimize_plan(alpha_grid[i], 1.0, estimates, cost_model, mode,
                        options);
      pt.alpha_e = plan.alpha_e;
      pt.mu = plan.mu;
      pt.efficiency = plan.efficiency;
      pt.ok = true;
    } catch (const Error& e) {
      pt.ok = false;
      pt.error = e.what();
      pt.alpha_e = pt.mu = pt.efficiency =
          std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

}  // namespace mfsobol
