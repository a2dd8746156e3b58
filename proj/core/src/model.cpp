#include "mfsobol/model.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

#include "mfsobol/errors.hpp"
#include "mfsobol/planner.hpp"
#include "models_detail.hpp"

namespace mfsobol {

Distribution Distribution::uniform(double lo, double hi) {
  // lo == hi is allowed: a point mass lets callers pin an input to a
  // constant (e.g. a zero-volatility pricer configuration).
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw InvalidParams("uniform bounds must be finite and ordered");
  }
  Distribution d;
  d.kind = DistKind::kUniform;
  d.lo = lo;
  d.hi = hi;
  return d;
}

Distribution Distribution::standard_normal() {
  Distribution d;
  d.kind = DistKind::kStandardNormal;
  return d;
}

double Distribution::sample(double u) const {
  switch (kind) {
    case DistKind::kUniform:
      return lo + (hi - lo) * u;
    case DistKind::kStandardNormal:
      return normal_inverse_cdf(u);
  }
  throw InvalidParams("unknown distribution kind");
}

bool Distribution::contains(double v) const {
  switch (kind) {
    case DistKind::kUniform:
      return v >= lo && v <= hi;
    case DistKind::kStandardNormal:
      return std::isfinite(v);
  }
  return false;
}

namespace {

void append_real(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
  out += ';';
}

void append_dist(std::string& out, const Distribution& d) {
  out += d.kind == DistKind::kUniform ? 'U' : 'N';
  append_real(out, d.lo);
  append_real(out, d.hi);
}

}  // namespace

std::string model_fingerprint(const ModelDescriptor& descriptor) {
  std::string canon = descriptor.name;
  canon += ';';
  canon += std::to_string(descriptor.p1);
  canon += ';';
  canon += std::to_string(descriptor.p2);
  canon += ';';
  for (const Distribution& d : descriptor.x_dist) {
    append_dist(canon, d);
  }
  for (const Distribution& d : descriptor.z_dist) {
    append_dist(canon, d);
  }
  append_real(canon, descriptor.rho);
  canon += descriptor.hierarchical ? '1' : '0';
  canon += ';';
  for (const auto& [key, value] : descriptor.params) {  // map: sorted keys
    canon += key;
    canon += '=';
    append_real(canon, value);
  }
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64-bit
  for (const unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

void Model::check_support(std::span<const double> x,
                          std::span<const double> z) const {
  if (x.size() != descriptor_.p1 || z.size() != descriptor_.p2) {
    throw OutOfSupport("input dimension mismatch for model '" +
                       descriptor_.name + "': got (" +
                       std::to_string(x.size()) + ", " +
                       std::to_string(z.size()) + "), expected (" +
                       std::to_string(descriptor_.p1) + ", " +
                       std::to_string(descriptor_.p2) + ")");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!descriptor_.x_dist[i].contains(x[i])) {
      throw OutOfSupport("x[" + std::to_string(i) + "] outside support");
    }
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!descriptor_.z_dist[i].contains(z[i])) {
      throw OutOfSupport("z[" + std::to_string(i) + "] outside support");
    }
  }
}

ReferenceIndex reference_index(const Model& model) {
  const auto ref = model.analytic_reference();
  if (!ref) {
    throw Unsupported("model '" + model.descriptor().name +
                      "' has no closed-form reference index");
  }
  return *ref;
}

namespace {

// Y = X + Z with X, Z i.i.d. standard normal; the coarse companion perturbs
// Y by delta * (X^2 - 1), which is mean-zero and pushes extra variance into
// the X-explained part:
//   S   = 1/2,
//   S_c = (1 + 2 delta^2) / (2 + 2 delta^2).
class LinearGaussianModel final : public Model {
 public:
  explicit LinearGaussianModel(double delta) : delta_(delta) {
    descriptor_.name = "linear-gaussian";
    descriptor_.p1 = 1;
    descriptor_.p2 = 1;
    descriptor_.x_dist = {Distribution::standard_normal()};
    descriptor_.z_dist = {Distribution::standard_normal()};
    descriptor_.rho = 0.5;
    descriptor_.hierarchical = true;
    descriptor_.params = {{"delta", delta}};
  }

  double evaluate_fine(std::span<const double> x, std::span<const double> z,
                       Seed /*noise_seed*/) const override {
    check_support(x, z);
    return x[0] + z[0];
  }

  CoupledValue evaluate_coupled(std::span<const double> x,
                                std::span<const double> z,
                                Seed /*noise_seed*/) const override {
    check_support(x, z);
    const double fine = x[0] + z[0];
    return {fine, fine + delta_ * (x[0] * x[0] - 1.0)};
  }

  std::optional<ReferenceIndex> analytic_reference() const override {
    ReferenceIndex ref;
    ref.s = 0.5;
    const double d2 = delta_ * delta_;
    ref.s_c = (1.0 + 2.0 * d2) / (2.0 + 2.0 * d2);
    return ref;
  }

 private:
  double delta_;
};

// f(x1, x2, x3) = sin x1 + a sin^2 x2 + b x3^4 sin x1, inputs uniform on
// [-pi, pi]; the group of interest is x1, the coarse companion drops the
// b-term.  Closed-form variances:
//   Var(Y)      = 1/2 + a^2/8 + b pi^4 / 5 + b^2 pi^8 / 18,
//   Var(E[Y|X]) = (1 + b pi^4 / 5)^2 / 2.
class IshigamiModel final : public Model {
 public:
  IshigamiModel(double a, double b) : a_(a), b_(b) {
    constexpr double pi = std::numbers::pi;
    descriptor_.name = "ishigami";
    descriptor_.p1 = 1;
    descriptor_.p2 = 2;
    descriptor_.x_dist = {Distribution::uniform(-pi, pi)};
    descriptor_.z_dist = {Distribution::uniform(-pi, pi),
                          Distribution::uniform(-pi, pi)};
    descriptor_.rho = 0.5;
    descriptor_.hierarchical = false;
    descriptor_.params = {{"a", a}, {"b", b}};
  }

  double evaluate_fine(std::span<const double> x, std::span<const double> z,
                       Seed /*noise_seed*/) const override {
    check_support(x, z);
    const double s1 = std::sin(x[0]);
    const double s2 = std::sin(z[0]);
    const double z4 = z[1] * z[1] * z[1] * z[1];
    return s1 + a_ * s2 * s2 + b_ * z4 * s1;
  }

  CoupledValue evaluate_coupled(std::span<const double> x,
                                std::span<const double> z,
                                Seed noise_seed) const override {
    const double fine = evaluate_fine(x, z, noise_seed);
    const double s1 = std::sin(x[0]);
    const double s2 = std::sin(z[0]);
    return {fine, s1 + a_ * s2 * s2};
  }

  std::optional<ReferenceIndex> analytic_reference() const override {
    constexpr double pi = std::numbers::pi;
    const double pi4 = pi * pi * pi * pi;
    const double pi8 = pi4 * pi4;
    const double var_y =
        0.5 + a_ * a_ / 8.0 + b_ * pi4 / 5.0 + b_ * b_ * pi8 / 18.0;
    const double v1 = 0.5 * (1.0 + b_ * pi4 / 5.0) * (1.0 + b_ * pi4 / 5.0);
    const double var_yc = 0.5 + a_ * a_ / 8.0;
    ReferenceIndex ref;
    ref.s = v1 / var_y;
    ref.s_c = 0.5 / var_yc;
    return ref;
  }

 private:
  double a_;
  double b_;
};

}  // namespace

std::unique_ptr<Model> make_model(const std::string& name,
                                  const std::map<std::string, double>& overrides) {
  if (name == "linear-gaussian") {
    detail::ParamReader params(overrides);
    const double delta = params.take("delta", 0.3);
    params.finish(name);
    return std::make_unique<LinearGaussianModel>(delta);
  }
  if (name == "ishigami") {
    detail::ParamReader params(overrides);
    const double a = params.take("a", 7.0);
    const double b = params.take("b", 0.1);
    params.finish(name);
    return std::make_unique<IshigamiModel>(a, b);
  }
  if (name == "heston") {
    return detail::make_heston_model(overrides);
  }
  throw InvalidParams("unknown model '" + name +
                      "'; available: linear-gaussian, ishigami, heston");
}

std::vector<std::string> builtin_model_names() {
  return {"linear-gaussian", "ishigami", "heston"};
}

}  // namespace mfsobol
