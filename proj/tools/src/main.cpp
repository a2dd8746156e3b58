#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "docio.hpp"
#include "mfsobol/driver.hpp"
#include "mfsobol/errors.hpp"
#include "mfsobol/heston.hpp"
#include "mfsobol/model.hpp"
#include "mfsobol/planner.hpp"

namespace {

using namespace mfsobol;

// Exit codes: 0 success, 2 configuration/schema problems, 3 numerical
// failures (degenerate samples and friends).
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

std::map<std::string, double> parse_param_overrides(
    const std::vector<std::string>& kvs) {
  std::map<std::string, double> out;
  for (const std::string& kv : kvs) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw InvalidParams("--param expects key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    double parsed = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, parsed);
    if (ec != std::errc() || ptr != last || value.empty()) {
      throw InvalidParams("--param " + key + ": '" + value +
                          "' is not a number");
    }
    if (!out.emplace(key, parsed).second) {
      throw InvalidParams("duplicate --param key '" + key + "'");
    }
  }
  return out;
}

struct ModelFlags {
  std::string name;
  std::vector<std::string> params;

  std::unique_ptr<Model> build() const {
    return make_model(name, parse_param_overrides(params));
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--model", flags.name, "built-in model name")->required();
  cmd->add_option("--param", flags.params,
                  "model parameter override key=value (repeatable)");
}

void cmd_pilot(const ModelFlags& model_flags, std::int64_t n, Seed seed,
               const std::string& out_path, int threads) {
  if (n < 2) {
    throw InvalidParams("pilot size must be at least 2, got " +
                        std::to_string(n));
  }
  const auto model = model_flags.build();
  const PilotRun run =
      run_pilot(*model, static_cast<std::size_t>(n), seed, threads);
  doc::PilotDoc d;
  d.model = model->descriptor().name;
  d.fingerprint = model_fingerprint(model->descriptor());
  d.master_seed = seed;
  d.cost_model.rho = model->descriptor().rho;
  d.cost_model.hierarchical = model->descriptor().hierarchical;
  d.estimates = run.estimates;
  doc::write_file(out_path, doc::render_json(doc::to_json(d)));
}

void cmd_plan(const std::string& pilot_path, double alpha, double length,
              const std::string& mode, const std::string& out_path,
              double mu_min) {
  const doc::PilotDoc pilot =
      doc::pilot_from_json(doc::read_json_file(pilot_path));
  OptimizerOptions options;
  options.mu_min = mu_min;
  doc::PlanDoc d;
  d.model = pilot.model;
  d.fingerprint = pilot.fingerprint;
  d.master_seed = pilot.master_seed;
  d.plan = optimize_plan(alpha, length, pilot.estimates, pilot.cost_model,
                         doc::split_mode_from_name(mode), options);
  doc::write_file(out_path, doc::render_json(doc::to_json(d)));
}

void cmd_estimate(const ModelFlags& model_flags, const std::string& plan_path,
                  Seed seed, const std::string& out_path, int threads) {
  const doc::PlanDoc plan =
      doc::plan_from_json(doc::read_json_file(plan_path));
  const auto model = model_flags.build();
  const std::string fingerprint = model_fingerprint(model->descriptor());
  if (model->descriptor().name != plan.model ||
      fingerprint != plan.fingerprint) {
    throw InvalidParams("plan was produced for model '" + plan.model +
                        "' (fingerprint " + plan.fingerprint +
                        "), but the configured model is '" +
                        model->descriptor().name + "' (fingerprint " +
                        fingerprint + ")");
  }
  const RunReport report = run_estimation(*model, plan.plan, seed, threads);
  doc::write_file(
      out_path,
      doc::render_json(doc::report_to_json(plan.model, fingerprint, report)));
}

void cmd_curve(const std::string& pilot_path, double alpha_min,
               double alpha_max, std::int64_t points, const std::string& mode,
               const std::string& out_path) {
  if (!(alpha_min > 0.0 && alpha_min < alpha_max && alpha_max < 1.0)) {
    throw InvalidParams("need 0 < alpha-min < alpha-max < 1");
  }
  if (points < 2) {
    throw InvalidParams("need at least 2 grid points");
  }
  const doc::PilotDoc pilot =
      doc::pilot_from_json(doc::read_json_file(pilot_path));
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double log_lo = std::log(alpha_min);
  const double log_hi = std::log(alpha_max);
  for (std::int64_t i = 0; i < points; ++i) {
    grid[static_cast<std::size_t>(i)] = std::exp(
        log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                     static_cast<double>(points - 1));
  }
  grid.front() = alpha_min;
  grid.back() = alpha_max;
  const auto curve =
      efficiency_curve(grid, pilot.estimates, pilot.cost_model,
                       doc::split_mode_from_name(mode), OptimizerOptions{});
  doc::write_file(out_path, doc::render_curve_csv(curve));
}

void cmd_truth(const ModelFlags& model_flags, const std::string& out_path) {
  const auto model = model_flags.build();
  const ReferenceIndex ref = reference_index(*model);
  doc::write_file(
      out_path,
      doc::render_json(doc::truth_to_json(
          model->descriptor().name, model_fingerprint(model->descriptor()),
          ref)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifidelity pick-freeze sensitivity toolkit"};
  app.set_version_flag("--version", doc::tool_version());
  app.require_subcommand(1);

  ModelFlags pilot_model;
  std::int64_t pilot_n = 100;
  Seed pilot_seed = 0;
  std::string pilot_out;
  int pilot_threads = 0;
  CLI::App* pilot = app.add_subcommand(
      "pilot", "run a coupled pilot study and write its document");
  add_model_flags(pilot, pilot_model);
  pilot->add_option("--n", pilot_n, "pilot sample size")->required();
  pilot->add_option("--seed", pilot_seed, "master seed")->required();
  pilot->add_option("--out", pilot_out, "output document path")->required();
  pilot->add_option("--threads", pilot_threads,
                    "worker threads (0 = hardware)");

  std::string plan_pilot_path, plan_mode, plan_out;
  double plan_alpha = 0, plan_length = 0, plan_mu_min = 1e-3;
  CLI::App* plan = app.add_subcommand(
      "plan", "optimize an experiment plan from a pilot document");
  plan->add_option("--pilot", plan_pilot_path, "pilot document path")
      ->required();
  plan->add_option("--alpha", plan_alpha, "target risk level in (0,1)")
      ->required();
  plan->add_option("--length", plan_length,
                   "target confidence-interval length")
      ->required();
  plan->add_option("--mode", plan_mode, "risk split: theorem | paper-figure")
      ->required();
  plan->add_option("--out", plan_out, "output document path")->required();
  plan->add_option("--mu-min", plan_mu_min, "lower bound of the mu search");

  ModelFlags est_model;
  std::string est_plan_path, est_out;
  Seed est_seed = 0;
  int est_threads = 0;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "execute a plan and write the run report");
  add_model_flags(estimate, est_model);
  estimate->add_option("--plan", est_plan_path, "plan document path")
      ->required();
  estimate->add_option("--seed", est_seed, "master seed")->required();
  estimate->add_option("--out", est_out, "output document path")->required();
  estimate->add_option("--threads", est_threads,
                       "worker threads (0 = hardware)");

  std::string curve_pilot_path, curve_mode, curve_out;
  double curve_alpha_min = 0, curve_alpha_max = 0;
  std::int64_t curve_points = 0;
  CLI::App* curve = app.add_subcommand(
      "curve", "tabulate optimal efficiency over a log-spaced alpha grid");
  curve->add_option("--pilot", curve_pilot_path, "pilot document path")
      ->required();
  curve->add_option("--alpha-min", curve_alpha_min, "smallest alpha")
      ->required();
  curve->add_option("--alpha-max", curve_alpha_max, "largest alpha")
      ->required();
  curve->add_option("--points", curve_points, "grid size (>= 2)")->required();
  curve->add_option("--mode", curve_mode, "risk split: theorem | paper-figure")
      ->required();
  curve->add_option("--out", curve_out, "output table path")->required();

  ModelFlags truth_model;
  std::string truth_out;
  CLI::App* truth = app.add_subcommand(
      "truth", "write the closed-form reference indices of an analytic model");
  add_model_flags(truth, truth_model);
  truth->add_option("--out", truth_out, "output document path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (pilot->parsed()) {
      cmd_pilot(pilot_model, pilot_n, pilot_seed, pilot_out, pilot_threads);
    } else if (plan->parsed()) {
      cmd_plan(plan_pilot_path, plan_alpha, plan_length, plan_mode, plan_out,
               plan_mu_min);
    } else if (estimate->parsed()) {
      cmd_estimate(est_model, est_plan_path, est_seed, est_out, est_threads);
    } else if (curve->parsed()) {
      cmd_curve(curve_pilot_path, curve_alpha_min, curve_alpha_max,
                curve_points, curve_mode, curve_out);
    } else if (truth->parsed()) {
      cmd_truth(truth_model, truth_out);
    }
  } catch (const DegenerateSample& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const LengthMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const InvalidSample& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const MissingCoarse& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const Error& e) {
    // Domain, parameter, support, schema and I/O problems are all
    // configuration mistakes.
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kNumericError;
  }
  return 0;
}
