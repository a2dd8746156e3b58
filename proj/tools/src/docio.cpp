#include "docio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#ifndef MFSOBOL_TOOL_VERSION
#define MFSOBOL_TOOL_VERSION "0.0.0"
#endif

namespace mfsobol::doc {

const char* tool_version() { return MFSOBOL_TOOL_VERSION; }

namespace {

void append_double(std::string& out, double v, const char* format) {
  if (!std::isfinite(v)) {
    out += "null";  // JSON has no NaN/Inf literal
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, format, v);
  out += buf;
}

void render_value(std::string& out, const nlohmann::ordered_json& v,
                  int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  switch (v.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& [key, child] : v.items()) {
        out += pad;
        out += nlohmann::ordered_json(key).dump();
        out += ": ";
        render_value(out, child, depth + 1);
        if (++i < v.size()) {
          out += ',';
        }
        out += '\n';
      }
      out += std::string(2 * depth, ' ');
      out += '}';
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        out += pad;
        render_value(out, v[i], depth + 1);
        if (i + 1 < v.size()) {
          out += ',';
        }
        out += '\n';
      }
      out += std::string(2 * depth, ' ');
      out += ']';
      return;
    }
    case nlohmann::ordered_json::value_t::string:
      out += v.dump();
      return;
    case nlohmann::ordered_json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case nlohmann::ordered_json::value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      return;
    case nlohmann::ordered_json::value_t::number_float:
      append_double(out, v.get<double>(), "%.17g");
      return;
    default:
      out += "null";
      return;
  }
}

// Strict object reader: every key must be consumed exactly once, leftovers
// are schema violations.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string context)
      : j_(j), ctx_(std::move(context)) {
    if (!j_.is_object()) {
      throw SchemaError(ctx_ + ": expected a JSON object");
    }
  }

  const nlohmann::json& get(const std::string& key) {
    const auto it = j_.find(key);
    if (it == j_.end()) {
      throw SchemaError(ctx_ + ": missing key '" + key + "'");
    }
    seen_.insert(key);
    return *it;
  }

  double number(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number()) {
      throw SchemaError(ctx_ + ": key '" + key + "' must be a number");
    }
    return v.get<double>();
  }

  // For fields rendered as null when non-finite (e.g. degenerate efficiency).
  double number_or_null(const std::string& key) {
    const auto& v = get(key);
    if (v.is_null()) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    if (!v.is_number()) {
      throw SchemaError(ctx_ + ": key '" + key + "' must be a number or null");
    }
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
      throw SchemaError(ctx_ + ": key '" + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
  }

  std::uint64_t seed(const std::string& key) {
    const auto& v = get(key);
    if (v.is_number_unsigned()) {
      return v.get<std::uint64_t>();
    }
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw SchemaError(ctx_ + ": key '" + key +
                      "' must be a nonnegative integer");
  }

  std::string str(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_string()) {
      throw SchemaError(ctx_ + ": key '" + key + "' must be a string");
    }
    return v.get<std::string>();
  }

  bool flag(const std::string& key) {
    const auto& v = get(key);
    if (!v.is_boolean()) {
      throw SchemaError(ctx_ + ": key '" + key + "' must be a boolean");
    }
    return v.get<bool>();
  }

  void finish() {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) {
        throw SchemaError(ctx_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const nlohmann::json& j_;
  std::string ctx_;
  std::set<std::string> seen_;
};

void expect_kind(ObjectReader& reader, const std::string& kind) {
  const std::string got = reader.str("kind");
  if (got != kind) {
    throw SchemaError("expected a '" + kind + "' document, got '" + got + "'");
  }
  reader.str("tool_version");  // accepted from any version, key required
}

nlohmann::ordered_json plan_fields_to_json(const Plan& plan) {
  nlohmann::ordered_json j;
  j["alpha"] = plan.alpha;
  j["alpha_e"] = plan.alpha_e;
  j["alpha_c"] = plan.alpha_c;
  j["mu"] = plan.mu;
  j["n"] = plan.n;
  j["psi_n"] = plan.psi_n;
  j["target_length"] = plan.target_length;
  j["predicted_cost"] = plan.predicted_cost;
  j["classical_cost"] = plan.classical_cost;
  j["efficiency"] = plan.efficiency;
  j["split_mode"] = split_mode_name(plan.split_mode);
  j["rho"] = plan.cost_model.rho;
  j["hierarchical"] = plan.cost_model.hierarchical;
  j["sigma_e"] = plan.sigma_e;
  j["sigma_c"] = plan.sigma_c;
  j["sigma_t_eta"] = plan.sigma_t_eta;
  j["degenerate_pilot"] = plan.degenerate_pilot;
  return j;
}

Plan plan_fields_from_reader(ObjectReader& reader) {
  Plan plan;
  plan.alpha = reader.number("alpha");
  plan.alpha_e = reader.number("alpha_e");
  plan.alpha_c = reader.number("alpha_c");
  plan.mu = reader.number("mu");
  plan.n = reader.integer("n");
  plan.psi_n = reader.integer("psi_n");
  plan.target_length = reader.number("target_length");
  plan.predicted_cost = reader.number("predicted_cost");
  plan.classical_cost = reader.number("classical_cost");
  plan.efficiency = reader.number_or_null("efficiency");
  plan.split_mode = split_mode_from_name(reader.str("split_mode"));
  plan.cost_model.rho = reader.number("rho");
  plan.cost_model.hierarchical = reader.flag("hierarchical");
  plan.sigma_e = reader.number("sigma_e");
  plan.sigma_c = reader.number("sigma_c");
  plan.sigma_t_eta = reader.number("sigma_t_eta");
  plan.degenerate_pilot = reader.flag("degenerate_pilot");
  return plan;
}

}  // namespace

std::string render_json(const nlohmann::ordered_json& value) {
  std::string out;
  render_value(out, value, 0);
  out += '\n';
  return out;
}

nlohmann::ordered_json to_json(const PilotDoc& d) {
  nlohmann::ordered_json j;
  j["kind"] = "pilot";
  j["tool_version"] = tool_version();
  j["model"] = d.model;
  j["model_fingerprint"] = d.fingerprint;
  j["master_seed"] = d.master_seed;
  j["n_pilot"] = d.estimates.pilot_size;
  j["rho"] = d.cost_model.rho;
  j["hierarchical"] = d.cost_model.hierarchical;
  nlohmann::ordered_json est;
  est["sigma_t_eta"] = d.estimates.sigma_t_eta;
  est["sigma_c"] = d.estimates.sigma_c;
  est["sigma_e"] = d.estimates.sigma_e;
  est["s_hat"] = d.estimates.s_hat;
  est["s_c_hat"] = d.estimates.s_c_hat;
  est["var_y"] = d.estimates.var_y;
  est["var_yc"] = d.estimates.var_yc;
  j["estimates"] = est;
  return j;
}

PilotDoc pilot_from_json(const nlohmann::json& j) {
  ObjectReader reader(j, "pilot document");
  expect_kind(reader, "pilot");
  PilotDoc d;
  d.model = reader.str("model");
  d.fingerprint = reader.str("model_fingerprint");
  d.master_seed = reader.seed("master_seed");
  d.estimates.pilot_size = reader.integer("n_pilot");
  d.cost_model.rho = reader.number("rho");
  d.cost_model.hierarchical = reader.flag("hierarchical");
  ObjectReader est(reader.get("estimates"), "pilot estimates");
  d.estimates.sigma_t_eta = est.number("sigma_t_eta");
  d.estimates.sigma_c = est.number("sigma_c");
  d.estimates.sigma_e = est.number("sigma_e");
  d.estimates.s_hat = est.number("s_hat");
  d.estimates.s_c_hat = est.number("s_c_hat");
  d.estimates.var_y = est.number("var_y");
  d.estimates.var_yc = est.number("var_yc");
  est.finish();
  reader.finish();
  return d;
}

nlohmann::ordered_json to_json(const PlanDoc& d) {
  nlohmann::ordered_json j;
  j["kind"] = "plan";
  j["tool_version"] = tool_version();
  j["model"] = d.model;
  j["model_fingerprint"] = d.fingerprint;
  j["master_seed"] = d.master_seed;
  const nlohmann::ordered_json fields = plan_fields_to_json(d.plan);
  for (const auto& [key, value] : fields.items()) {
    j[key] = value;
  }
  return j;
}

PlanDoc plan_from_json(const nlohmann::json& j) {
  ObjectReader reader(j, "plan document");
  expect_kind(reader, "plan");
  PlanDoc d;
  d.model = reader.str("model");
  d.fingerprint = reader.str("model_fingerprint");
  d.master_seed = reader.seed("master_seed");
  d.plan = plan_fields_from_reader(reader);
  reader.finish();
  return d;
}

nlohmann::ordered_json report_to_json(const std::string& model,
                                      const std::string& fingerprint,
                                      const RunReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = "report";
  j["tool_version"] = tool_version();
  j["model"] = model;
  j["model_fingerprint"] = fingerprint;
  j["master_seed"] = report.master_seed;
  j["v_n"] = report.v_n;
  j["t_n_coarse"] = report.t_n_coarse;
  j["e_n"] = report.e_n;
  nlohmann::ordered_json ci;
  ci["center"] = report.interval.center;
  ci["half_width"] = report.interval.half_width;
  ci["lower"] = report.interval.center - report.interval.half_width;
  ci["upper"] = report.interval.center + report.interval.half_width;
  ci["nominal_level"] = report.interval.nominal_level;
  j["interval"] = ci;
  j["n"] = report.n;
  j["psi_n"] = report.psi_n;
  j["fine_evals"] = report.fine_evals;
  j["coarse_evals"] = report.coarse_evals;
  j["realized_cost"] = report.realized_cost;
  j["plan"] = plan_fields_to_json(report.plan);
  return j;
}

nlohmann::ordered_json truth_to_json(const std::string& model,
                                     const std::string& fingerprint,
                                     const ReferenceIndex& ref) {
  nlohmann::ordered_json j;
  j["kind"] = "truth";
  j["tool_version"] = tool_version();
  j["model"] = model;
  j["model_fingerprint"] = fingerprint;
  j["s"] = ref.s;
  j["s_c"] = ref.s_c;
  return j;
}

std::string render_curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = "alpha,alpha_e,mu,efficiency\n";
  for (const CurvePoint& p : points) {
    append_double(out, p.alpha, "%.10g");
    out += ',';
    append_double(out, p.alpha_e, "%.10g");
    out += ',';
    append_double(out, p.mu, "%.10g");
    out += ',';
    append_double(out, p.efficiency, "%.10g");
    out += '\n';
  }
  return out;
}

std::string split_mode_name(SplitMode mode) {
  return mode == SplitMode::kTheorem ? "theorem" : "paper-figure";
}

SplitMode split_mode_from_name(const std::string& name) {
  if (name == "theorem") {
    return SplitMode::kTheorem;
  }
  if (name == "paper-figure") {
    return SplitMode::kPaperFigure;
  }
  throw SchemaError("unknown split mode '" + name +
                    "'; expected 'theorem' or 'paper-figure'");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    throw IoError("failed while writing '" + path + "'");
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace mfsobol::doc
