#include "mfsobol/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "mfsobol/errors.hpp"

namespace mfsobol {

namespace {

// Per-index substream slot layout (see rng.hpp for the key construction):
//   [0, p1)              coordinates of X_i
//   [p1, p1+p2)          coordinates of Z_i
//   [p1+p2, p1+2*p2)     coordinates of Z_i'
//   p1+2*p2              evaluator noise seed, unprimed role
//   p1+2*p2 + 1          evaluator noise seed, primed role
double draw_coordinate(const Distribution& dist, Seed master,
                       std::uint64_t tag, std::uint64_t index,
                       std::uint64_t slot) {
  return dist.sample(stream_u01(derive_key(master, tag, index, slot), 0));
}

}  // namespace

Design generate_design(const Model& model, std::size_t n, Seed master_seed,
                       StreamTag tag) {
  const ModelDescriptor& d = model.descriptor();
  const std::uint64_t tag_v = static_cast<std::uint64_t>(tag);
  const std::uint64_t p1 = d.p1;
  const std::uint64_t p2 = d.p2;

  Design design;
  design.x.resize(n);
  design.z.resize(n);
  design.z_prime.resize(n);
  design.noise_seeds.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    design.x[i].resize(p1);
    design.z[i].resize(p2);
    design.z_prime[i].resize(p2);
    for (std::uint64_t c = 0; c < p1; ++c) {
      design.x[i][c] = draw_coordinate(d.x_dist[c], master_seed, tag_v, i, c);
    }
    for (std::uint64_t c = 0; c < p2; ++c) {
      design.z[i][c] =
          draw_coordinate(d.z_dist[c], master_seed, tag_v, i, p1 + c);
      design.z_prime[i][c] =
          draw_coordinate(d.z_dist[c], master_seed, tag_v, i, p1 + p2 + c);
    }
    design.noise_seeds[i][0] = derive_key(master_seed, tag_v, i, p1 + 2 * p2);
    design.noise_seeds[i][1] =
        derive_key(master_seed, tag_v, i, p1 + 2 * p2 + 1);
  }
  return design;
}

void parallel_for_index(std::size_t n, int threads,
                        const std::function<void(std::size_t)>& fn) {
  if (n == 0) {
    return;
  }
  std::size_t want = threads > 0 ? static_cast<std::size_t>(threads)
                                 : std::thread::hardware_concurrency();
  want = std::clamp<std::size_t>(want, 1, n);
  if (want == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) {
        return;
      }
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) {
        return;
      }
      try {
        fn(i);
      } catch (...) {
        {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) {
            first_error = std::current_exception();
          }
        }
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(want);
  for (std::size_t t = 0; t < want; ++t) {
    pool.emplace_back(worker);
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }
}

PilotRun run_pilot(const Model& model, std::size_t n_pilot, Seed master_seed,
                   int threads) {
  const Design design =
      generate_design(model, n_pilot, master_seed, StreamTag::kPilot);

  PairedSample sample;
  sample.y.resize(n_pilot);
  sample.y_prime.resize(n_pilot);
  sample.yc.emplace(n_pilot);
  sample.yc_prime.emplace(n_pilot);
  parallel_for_index(n_pilot, threads, [&](std::size_t i) {
    const CoupledValue v = model.evaluate_coupled(
        design.x[i], design.z[i], design.noise_seeds[i][0]);
    const CoupledValue vp = model.evaluate_coupled(
        design.x[i], design.z_prime[i], design.noise_seeds[i][1]);
    sample.y[i] = v.fine;
    (*sample.yc)[i] = v.coarse;
    sample.y_prime[i] = vp.fine;
    (*sample.yc_prime)[i] = vp.coarse;
  });

  PilotRun run;
  run.estimates = estimate_all(sample);
  run.sample = std::move(sample);
  return run;
}

RunReport run_estimation(const Model& model, const Plan& plan,
                         Seed master_seed, int threads) {
  const ModelDescriptor& d = model.descriptor();
  if (plan.cost_model.hierarchical != d.hierarchical ||
      plan.cost_model.rho != d.rho) {
    throw InvalidParams(
        "plan cost model (rho=" + std::to_string(plan.cost_model.rho) +
        ", hierarchical=" + (plan.cost_model.hierarchical ? "yes" : "no") +
        ") does not match model '" + d.name + "'");
  }
  if (plan.n < 2 || plan.psi_n < 2 || plan.psi_n > plan.n) {
    throw InvalidParams("plan sample sizes must satisfy 2 <= psi_n <= n");
  }

  // Sample A: coarse-only evaluations on a fresh substream.
  const Design design_a =
      generate_design(model, static_cast<std::size_t>(plan.n), master_seed,
                      StreamTag::kMainCoarse);
  std::vector<double> a_y(plan.n), a_yp(plan.n);
  parallel_for_index(static_cast<std::size_t>(plan.n), threads,
                     [&](std::size_t i) {
                       a_y[i] = model.evaluate_coarse(
                           design_a.x[i], design_a.z[i],
                           design_a.noise_seeds[i][0]);
                       a_yp[i] = model.evaluate_coarse(
                           design_a.x[i], design_a.z_prime[i],
                           design_a.noise_seeds[i][1]);
                     });
  const PickFreezeStat t_coarse = pick_freeze_statistic(a_y, a_yp);

  // Sample B: coupled fine/coarse evaluations on a disjoint substream; the
  // correction is the difference of the two statistics on identical inputs.
  const Design design_b =
      generate_design(model, static_cast<std::size_t>(plan.psi_n), master_seed,
                      StreamTag::kMainCoupled);
  std::vector<double> b_f(plan.psi_n), b_fp(plan.psi_n), b_c(plan.psi_n),
      b_cp(plan.psi_n);
  parallel_for_index(static_cast<std::size_t>(plan.psi_n), threads,
                     [&](std::size_t i) {
                       const CoupledValue v = model.evaluate_coupled(
                           design_b.x[i], design_b.z[i],
                           design_b.noise_seeds[i][0]);
                       const CoupledValue vp = model.evaluate_coupled(
                           design_b.x[i], design_b.z_prime[i],
                           design_b.noise_seeds[i][1]);
                       b_f[i] = v.fine;
                       b_c[i] = v.coarse;
                       b_fp[i] = vp.fine;
                       b_cp[i] = vp.coarse;
                     });
  const PickFreezeStat t_fine_b = pick_freeze_statistic(b_f, b_fp);
  const PickFreezeStat t_coarse_b = pick_freeze_statistic(b_c, b_cp);

  RunReport report;
  report.t_n_coarse = t_coarse.value;
  report.e_n = t_fine_b.value - t_coarse_b.value;
  report.v_n = report.t_n_coarse + report.e_n;
  report.interval =
      confidence_interval(report.v_n, plan, plan.sigma_e, plan.sigma_c);
  report.n = plan.n;
  report.psi_n = plan.psi_n;
  report.fine_evals = 2 * plan.psi_n;
  report.coarse_evals = 2 * (plan.n + plan.psi_n);
  const double psi = static_cast<double>(plan.psi_n);
  const double n_d = static_cast<double>(plan.n);
  report.realized_cost =
      plan.cost_model.hierarchical
          ? 2.0 * psi + 2.0 * plan.cost_model.rho * n_d
          : 4.0 * psi + 2.0 * plan.cost_model.rho * n_d;
  report.master_seed = master_seed;
  report.plan = plan;
  return report;
}

}  // namespace mfsobol
