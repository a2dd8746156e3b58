#include "mfsobol/heston.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfsobol/errors.hpp"
#include "mfsobol/model.hpp"
#include "mfsobol/planner.hpp"
#include "models_detail.hpp"

namespace mfsobol {

std::int64_t HestonParams::steps() const {
  return std::llround(maturity / h);
}

void HestonParams::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(nu0) || !finite(kappa) || !finite(theta) || !finite(corr) ||
      !finite(xi) || !finite(rate) || !finite(s0) || !finite(strike)) {
    throw InvalidParams("Heston parameters must be finite");
  }
  if (!(corr >= -1.0 && corr <= 1.0)) {
    throw InvalidParams("Brownian correlation must lie in [-1, 1], got " +
                        std::to_string(corr));
  }
  if (!finite(h) || !(h > 0.0)) {
    throw InvalidParams("timestep h must be positive");
  }
  if (!finite(maturity) || !(maturity > 0.0)) {
    throw InvalidParams("maturity must be positive");
  }
  const double ratio = maturity / h;
  const std::int64_t n = std::llround(ratio);
  if (n < 1 ||
      std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidParams("maturity/h must be a positive integer step count");
  }
  if (m_coarse < 1 || m_fine < m_coarse) {
    throw InvalidParams("path counts must satisfy 1 <= m_coarse <= m_fine");
  }
}

std::vector<double> heston_terminal_prices(const HestonParams& params,
                                           std::int64_t n_paths,
                                           Seed noise_seed) {
  params.validate();
  if (n_paths < 1) {
    throw InvalidParams("n_paths must be >= 1");
  }
  const std::int64_t steps = params.steps();
  const double sqrt_h = std::sqrt(params.h);
  const double cross =
      std::sqrt(std::max(0.0, 1.0 - params.corr * params.corr));
  const double drift = 1.0 + params.rate * params.h;

  std::vector<double> out(static_cast<std::size_t>(n_paths));
  for (std::int64_t j = 0; j < n_paths; ++j) {
    double s = params.s0;
    double nu = params.nu0;
    const std::uint64_t path_base =
        static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(steps) * 2;
    for (std::int64_t t = 0; t < steps; ++t) {
      const std::uint64_t c = path_base + static_cast<std::uint64_t>(t) * 2;
      const double dw1 = normal_inverse_cdf(stream_u01(noise_seed, c));
      const double dw2 = normal_inverse_cdf(stream_u01(noise_seed, c + 1));
      const double root = std::sqrt(std::max(nu, 0.0));
      const double nu_bracket =
          params.kappa * (params.theta - nu) * params.h +
          params.xi * root * sqrt_h * (params.corr * dw1 + cross * dw2);
      s = s * (drift + root * sqrt_h * dw1);
      // The variance recursion multiplies the whole bracket by the previous
      // value by default; the additive variant updates it incrementally.
      nu = params.additive_nu ? nu + nu_bracket : nu * (1.0 + nu_bracket);
    }
    out[static_cast<std::size_t>(j)] = s;
  }
  return out;
}

double heston_discounted_call_mean(const HestonParams& params,
                                   std::span<const double> terminal_prices,
                                   std::int64_t n_paths) {
  if (n_paths < 1) {
    throw InvalidParams("n_paths must be >= 1");
  }
  if (static_cast<std::size_t>(n_paths) > terminal_prices.size()) {
    throw InvalidParams("n_paths exceeds the available terminal prices");
  }
  double sum = 0.0;
  for (std::int64_t j = 0; j < n_paths; ++j) {
    sum += std::max(terminal_prices[static_cast<std::size_t>(j)] -
                        params.strike,
                    0.0);
  }
  return std::exp(-params.rate * params.maturity) *
         (sum / static_cast<double>(n_paths));
}

namespace {

// Monte-Carlo call pricer with uncertain (nu0 | kappa, theta, corr, xi, rate).
// The coarse evaluator reuses the fine payoffs, averaging only the first
// m_coarse of them, so coarse values come free with fine ones.
class HestonModel final : public Model {
 public:
  HestonModel(const HestonParams& base, const Distribution& nu0_dist,
              const std::vector<Distribution>& z_dists)
      : base_(base) {
    descriptor_.name = "heston";
    descriptor_.p1 = 1;
    descriptor_.p2 = 5;
    descriptor_.x_dist = {nu0_dist};
    descriptor_.z_dist = z_dists;
    descriptor_.rho = static_cast<double>(base.m_coarse) /
                      static_cast<double>(base.m_fine);
    descriptor_.hierarchical = true;
    descriptor_.params = {
        {"s0", base.s0},
        {"maturity", base.maturity},
        {"strike", base.strike},
        {"h", base.h},
        {"m_fine", static_cast<double>(base.m_fine)},
        {"m_coarse", static_cast<double>(base.m_coarse)},
        {"additive_nu", base.additive_nu ? 1.0 : 0.0},
    };
  }

  double evaluate_fine(std::span<const double> x, std::span<const double> z,
                       Seed noise_seed) const override {
    check_support(x, z);
    const HestonParams p = bind(x, z);
    const auto prices = heston_terminal_prices(p, p.m_fine, noise_seed);
    return heston_discounted_call_mean(p, prices, p.m_fine);
  }

  CoupledValue evaluate_coupled(std::span<const double> x,
                                std::span<const double> z,
                                Seed noise_seed) const override {
    check_support(x, z);
    const HestonParams p = bind(x, z);
    const auto prices = heston_terminal_prices(p, p.m_fine, noise_seed);
    CoupledValue out;
    out.fine = heston_discounted_call_mean(p, prices, p.m_fine);
    out.coarse = heston_discounted_call_mean(p, prices, p.m_coarse);
    return out;
  }

 private:
  HestonParams bind(std::span<const double> x,
                    std::span<const double> z) const {
    HestonParams p = base_;
    p.nu0 = x[0];
    p.kappa = z[0];
    p.theta = z[1];
    p.corr = z[2];
    p.xi = z[3];
    p.rate = z[4];
    return p;
  }

  HestonParams base_;
};

std::int64_t to_path_count(double v, const char* key) {
  const std::int64_t n = std::llround(v);
  if (!(v >= 1.0) || static_cast<double>(n) != v) {
    throw InvalidParams(std::string(key) + " must be a positive integer");
  }
  return n;
}

}  // namespace

namespace detail {

std::unique_ptr<Model> make_heston_model(
    const std::map<std::string, double>& overrides) {
  ParamReader params(overrides);

  HestonParams base;
  base.s0 = params.take("s0", base.s0);
  base.maturity = params.take("maturity", base.maturity);
  base.strike = params.take("strike", base.strike);
  base.h = params.take("h", base.h);
  base.m_fine =
      to_path_count(params.take("m_fine", static_cast<double>(base.m_fine)),
                    "m_fine");
  base.m_coarse = to_path_count(
      params.take("m_coarse", static_cast<double>(base.m_coarse)), "m_coarse");
  base.additive_nu = params.take_flag("additive_nu", false);

  const double nu0_min = params.take("nu0_min", 0.2);
  const double nu0_max = params.take("nu0_max", 0.25);
  const double kappa_min = params.take("kappa_min", 0.0);
  const double kappa_max = params.take("kappa_max", 3.0);
  const double theta_min = params.take("theta_min", 0.2);
  const double theta_max = params.take("theta_max", 0.22);
  const double r_min = params.take("r_min", -1.0);
  const double r_max = params.take("r_max", 1.0);
  const double xi_min = params.take("xi_min", 0.0);
  const double xi_max = params.take("xi_max", 0.4);
  const double rate_min = params.take("R_min", 0.08);
  const double rate_max = params.take("R_max", 1.1);
  params.finish("heston");

  if (r_min < -1.0 || r_max > 1.0) {
    throw InvalidParams("correlation bounds must stay within [-1, 1]");
  }

  // Validate the fixed contract/discretization block once up front, with the
  // uncertain inputs pinned to their bound midpoints.
  HestonParams probe = base;
  probe.nu0 = 0.5 * (nu0_min + nu0_max);
  probe.kappa = 0.5 * (kappa_min + kappa_max);
  probe.theta = 0.5 * (theta_min + theta_max);
  probe.corr = 0.5 * (r_min + r_max);
  probe.xi = 0.5 * (xi_min + xi_max);
  probe.rate = 0.5 * (rate_min + rate_max);
  probe.validate();

  const Distribution nu0_dist = Distribution::uniform(nu0_min, nu0_max);
  const std::vector<Distribution> z_dists = {
      Distribution::uniform(kappa_min, kappa_max),
      Distribution::uniform(theta_min, theta_max),
      Distribution::uniform(r_min, r_max),
      Distribution::uniform(xi_min, xi_max),
      Distribution::uniform(rate_min, rate_max),
  };
  return std::make_unique<HestonModel>(base, nu0_dist, z_dists);
}

}  // namespace detail

}  // namespace mfsobol
