#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mfsobol/driver.hpp"
#include "mfsobol/errors.hpp"

// Document layer of the command-line tool: JSON documents for pilot studies,
// plans, run reports and reference values, plus the CSV table for efficiency
// curves.  All rendering is fully deterministic: fixed key order, doubles at
// 17 significant digits (round-trip exact), tables at 10.  Readers validate
// the schema strictly and reject unknown keys.
namespace mfsobol::doc {

class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

const char* tool_version();

// Canonical rendering: 2-space indent, "%.17g" doubles (non-finite -> null),
// trailing newline.  Byte-identical across reruns by construction.
std::string render_json(const nlohmann::ordered_json& value);

struct PilotDoc {
  std::string model;
  std::string fingerprint;
  Seed master_seed = 0;
  CostModel cost_model;
  VarianceEstimates estimates;  // pilot_size carries the sample size
};

struct PlanDoc {
  std::string model;
  std::string fingerprint;
  Seed master_seed = 0;  // seed of the pilot the plan was built from
  Plan plan;
};

nlohmann::ordered_json to_json(const PilotDoc& d);
nlohmann::ordered_json to_json(const PlanDoc& d);
nlohmann::ordered_json report_to_json(const std::string& model,
                                      const std::string& fingerprint,
                                      const RunReport& report);
nlohmann::ordered_json truth_to_json(const std::string& model,
                                     const std::string& fingerprint,
                                     const ReferenceIndex& ref);

PilotDoc pilot_from_json(const nlohmann::json& j);
PlanDoc plan_from_json(const nlohmann::json& j);

// Header `alpha,alpha_e,mu,efficiency`, one row per point, 10 significant
// digits, every row newline-terminated.
std::string render_curve_csv(const std::vector<CurvePoint>& points);

std::string split_mode_name(SplitMode mode);
SplitMode split_mode_from_name(const std::string& name);

void write_file(const std::string& path, const std::string& content);
nlohmann::json read_json_file(const std::string& path);

}  // namespace mfsobol::doc
