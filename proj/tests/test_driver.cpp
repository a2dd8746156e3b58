#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "mfsobol/driver.hpp"
#include "mfsobol/errors.hpp"
#include "mfsobol/model.hpp"
#include "testutil.hpp"

using namespace mfsobol;
using testutil::rel_diff;

namespace {

bool same_design(const Design& a, const Design& b) {
  return a.x == b.x && a.z == b.z && a.z_prime == b.z_prime &&
         a.noise_seeds == b.noise_seeds;
}

bool same_report(const RunReport& a, const RunReport& b) {
  return a.v_n == b.v_n && a.t_n_coarse == b.t_n_coarse && a.e_n == b.e_n &&
         a.interval.center == b.interval.center &&
         a.interval.half_width == b.interval.half_width &&
         a.interval.nominal_level == b.interval.nominal_level &&
         a.n == b.n && a.psi_n == b.psi_n && a.fine_evals == b.fine_evals &&
         a.coarse_evals == b.coarse_evals &&
         a.realized_cost == b.realized_cost;
}

Plan lg_plan(const Model& model, double alpha, double length) {
  const PilotRun pilot = run_pilot(model, 2000, 1001);
  CostModel cm;
  cm.rho = model.descriptor().rho;
  cm.hierarchical = model.descriptor().hierarchical;
  return optimize_plan(alpha, length, pilot.estimates, cm,
                       SplitMode::kTheorem);
}

}  // namespace

TEST_CASE("design generation is deterministic and stream-separated") {
  const auto m = make_model("heston");
  const Design d1 = generate_design(*m, 200, 42, StreamTag::kPilot);
  const Design d2 = generate_design(*m, 200, 42, StreamTag::kPilot);
  CHECK(same_design(d1, d2));

  const Design d3 = generate_design(*m, 200, 42, StreamTag::kMainCoarse);
  CHECK_FALSE(same_design(d1, d3));
  const Design d4 = generate_design(*m, 200, 43, StreamTag::kPilot);
  CHECK_FALSE(same_design(d1, d4));

  // z and z' are distinct draws of the same distribution.
  CHECK(d1.z != d1.z_prime);

  // Non-collision audit across indices and tags.
  std::set<Seed> seen;
  std::size_t total = 0;
  for (const StreamTag tag :
       {StreamTag::kPilot, StreamTag::kMainCoarse, StreamTag::kMainCoupled}) {
    const Design d = generate_design(*m, 200, 42, tag);
    for (const auto& pair : d.noise_seeds) {
      seen.insert(pair[0]);
      seen.insert(pair[1]);
      total += 2;
    }
  }
  CHECK(seen.size() == total);
}

TEST_CASE("design coordinates follow the declared distributions") {
  const auto m = make_model("heston");
  const std::size_t n = 100000;
  const Design d = generate_design(*m, n, 7, StreamTag::kPilot);
  const double bound = 4.0 / std::sqrt(static_cast<double>(n));

  auto check_uniform_mean = [&](const std::vector<std::vector<double>>& rows,
                                const std::vector<Distribution>& dists) {
    for (std::size_t k = 0; k < dists.size(); ++k) {
      double mean = 0;
      for (const auto& row : rows) {
        mean += (row[k] - dists[k].lo) / (dists[k].hi - dists[k].lo);
      }
      mean /= static_cast<double>(rows.size());
      CHECK(std::abs(mean - 0.5) <= bound);
    }
  };
  check_uniform_mean(d.x, m->descriptor().x_dist);
  check_uniform_mean(d.z, m->descriptor().z_dist);
  check_uniform_mean(d.z_prime, m->descriptor().z_dist);
}

TEST_CASE("pilot run: coupled evaluations and exact degenerate cancellation") {
  const auto collapsed = make_model("linear-gaussian", {{"delta", 0.0}});
  const PilotRun run = run_pilot(*collapsed, 500, 9);
  CHECK(run.estimates.sigma_e == 0.0);
  CHECK(run.estimates.sigma_c == run.estimates.sigma_t_eta);

  // The returned sample reproduces the returned estimates.
  const VarianceEstimates redo = estimate_all(run.sample);
  CHECK(redo.sigma_t_eta == run.estimates.sigma_t_eta);
  CHECK(redo.sigma_c == run.estimates.sigma_c);
  CHECK(redo.sigma_e == run.estimates.sigma_e);
  CHECK(redo.s_hat == run.estimates.s_hat);
  CHECK(redo.var_y == run.estimates.var_y);
}

TEST_CASE("pilot run: index estimate converges to the analytic value") {
  const auto m = make_model("linear-gaussian");
  const PilotRun run = run_pilot(*m, 100000, 31);
  CHECK(std::abs(run.estimates.s_hat - 0.5) <= 0.01);
  CHECK(run.estimates.pilot_size == 100000);
}

TEST_CASE("estimation run: identities, accounting, and interval") {
  const auto m = make_model("linear-gaussian");
  const Plan plan = lg_plan(*m, 0.1, 0.1);
  REQUIRE(plan.psi_n >= 2);
  const RunReport r = run_estimation(*m, plan, 77);

  CHECK(r.v_n == r.t_n_coarse + r.e_n);
  CHECK(r.n == plan.n);
  CHECK(r.psi_n == plan.psi_n);
  CHECK(r.fine_evals == 2 * plan.psi_n);
  CHECK(r.coarse_evals == 2 * (plan.n + plan.psi_n));
  CHECK(r.master_seed == 77);

  // Hierarchical accounting: paid cost is fine evaluations at unit price
  // plus the coarse-only sample at rho, coupled coarse values being free.
  const double count_cost = 2.0 * static_cast<double>(plan.psi_n) +
                            2.0 * plan.cost_model.rho *
                                static_cast<double>(plan.n);
  CHECK(rel_diff(r.realized_cost, count_cost) <= 1e-12);
  // Ceiling effects keep it within a few units of the planned-cost formula.
  CHECK(std::abs(r.realized_cost -
                 plan_cost(static_cast<double>(plan.n), plan.mu,
                           plan.cost_model)) <= 4.0);

  CHECK(r.interval.center == r.v_n);
  CHECK(r.interval.half_width <= plan.target_length / 2 + 1e-12);
  CHECK(r.interval.nominal_level == 1.0 - plan.alpha);
}

TEST_CASE("estimation run: collapsed coarse model zeroes the correction") {
  const auto m = make_model("linear-gaussian", {{"delta", 0.0}});
  Plan plan = lg_plan(*m, 0.1, 0.2);
  // A zero-sigma_e pilot legitimately drives psi to the floor; lift it to
  // the smallest runnable coupled-sample size.
  plan.psi_n = std::max<std::int64_t>(plan.psi_n, 2);
  REQUIRE(plan.n >= plan.psi_n);
  const RunReport r = run_estimation(*m, plan, 5);
  CHECK(r.e_n == 0.0);
  CHECK(r.v_n == r.t_n_coarse);
}

TEST_CASE("estimation run: bit-identical across reruns and thread counts") {
  const auto m = make_model("linear-gaussian");
  const Plan plan = lg_plan(*m, 0.1, 0.15);
  const RunReport r1 = run_estimation(*m, plan, 301, 1);
  const RunReport r2 = run_estimation(*m, plan, 301, 1);
  const RunReport r3 = run_estimation(*m, plan, 301, 2);
  const RunReport r4 = run_estimation(*m, plan, 301, 4);
  CHECK(same_report(r1, r2));
  CHECK(same_report(r1, r3));
  CHECK(same_report(r1, r4));

  const PilotRun p1 = run_pilot(*m, 400, 11, 1);
  const PilotRun p2 = run_pilot(*m, 400, 11, 3);
  CHECK(p1.estimates.sigma_t_eta == p2.estimates.sigma_t_eta);
  CHECK(p1.estimates.sigma_c == p2.estimates.sigma_c);
  CHECK(p1.estimates.sigma_e == p2.estimates.sigma_e);
  CHECK(p1.sample.y == p2.sample.y);

  // A different master seed changes the outcome.
  const RunReport r5 = run_estimation(*m, plan, 302, 1);
  CHECK_FALSE(same_report(r1, r5));
}

TEST_CASE("estimation run: quick coverage smoke check") {
  const auto m = make_model("linear-gaussian");
  const Plan plan = lg_plan(*m, 0.1, 0.1);
  int covered = 0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    const RunReport r =
        run_estimation(*m, plan, 9000 + static_cast<Seed>(rep));
    if (std::abs(r.v_n - 0.5) <= r.interval.half_width) ++covered;
  }
  CHECK(covered >= 40);  // nominal 90%, conservative in practice
}

TEST_CASE("estimation run: plan/model consistency is enforced") {
  const auto m = make_model("linear-gaussian");
  Plan plan = lg_plan(*m, 0.1, 0.2);

  Plan wrong_rho = plan;
  wrong_rho.cost_model.rho = 0.25;
  CHECK_THROWS_AS(run_estimation(*m, wrong_rho, 1), InvalidParams);

  Plan wrong_h = plan;
  wrong_h.cost_model.hierarchical = false;
  CHECK_THROWS_AS(run_estimation(*m, wrong_h, 1), InvalidParams);

  Plan tiny = plan;
  tiny.n = 1;
  tiny.psi_n = 1;
  CHECK_THROWS_AS(run_estimation(*m, tiny, 1), InvalidParams);

  Plan inverted = plan;
  inverted.psi_n = inverted.n + 1;
  CHECK_THROWS_AS(run_estimation(*m, inverted, 1), InvalidParams);
}

TEST_CASE("parallel map covers every index exactly once") {
  for (int threads : {0, 1, 2, 5}) {
    std::vector<int> hits(997, 0);
    parallel_for_index(hits.size(), threads,
                       [&](std::size_t i) { hits[i] += 1; });
    std::size_t wrong = 0;
    for (int h : hits) {
      if (h != 1) ++wrong;
    }
    CHECK(wrong == 0);
  }
  parallel_for_index(0, 2, [&](std::size_t) { REQUIRE(false); });
}

TEST_CASE("parallel map propagates exceptions") {
  CHECK_THROWS_AS(
      parallel_for_index(100, 4,
                         [&](std::size_t i) {
                           if (i == 57) throw InvalidParams("boom");
                         }),
      InvalidParams);
}
