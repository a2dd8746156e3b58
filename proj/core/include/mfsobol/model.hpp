#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfsobol/rng.hpp"

namespace mfsobol {

enum class DistKind {
  kUniform,
  kStandardNormal,
};

// Marginal input distribution of one coordinate.
struct Distribution {
  DistKind kind = DistKind::kStandardNormal;
  double lo = 0;  // uniform bounds; unused for the normal
  double hi = 0;

  static Distribution uniform(double lo, double hi);
  static Distribution standard_normal();

  // Inverse-CDF transform of a uniform u in (0, 1).
  double sample(double u) const;
  bool contains(double v) const;
};

// Static description of a model: input structure, distributions, cost ratio
// of the coarse evaluator, and the resolved numeric parameters.
struct ModelDescriptor {
  std::string name;
  std::size_t p1 = 0;  // dimension of the group of interest X
  std::size_t p2 = 0;  // dimension of the remaining inputs Z
  std::vector<Distribution> x_dist;
  std::vector<Distribution> z_dist;
  double rho = 0.5;
  bool hierarchical = false;
  std::map<std::string, double> params;
};

// Stable short hash of a descriptor, used to guard against mixing documents
// produced for different model configurations.
std::string model_fingerprint(const ModelDescriptor& descriptor);

struct CoupledValue {
  double fine = 0;
  double coarse = 0;
};

struct ReferenceIndex {
  double s = 0;    // Var(E[Y|X]) / Var(Y) of the fine model
  double s_c = 0;  // same quantity for the coarse model
};

// A fine/coarse model pair.  Evaluators are pure functions of
// (x, z, noise_seed); all internal randomness flows through the seed, so
// batch evaluation in any order or on any thread count is reproducible.
class Model {
 public:
  virtual ~Model() = default;

  const ModelDescriptor& descriptor() const { return descriptor_; }

  virtual double evaluate_fine(std::span<const double> x,
                               std::span<const double> z,
                               Seed noise_seed) const = 0;

  // Fine and coarse outputs at the same inputs and the same noise seed.
  // The fine component equals evaluate_fine bit-for-bit.
  virtual CoupledValue evaluate_coupled(std::span<const double> x,
                                        std::span<const double> z,
                                        Seed noise_seed) const = 0;

  virtual double evaluate_coarse(std::span<const double> x,
                                 std::span<const double> z,
                                 Seed noise_seed) const {
    return evaluate_coupled(x, z, noise_seed).coarse;
  }

  // Closed-form (or deterministic-quadrature) indices for analytic models;
  // empty for Monte-Carlo models.
  virtual std::optional<ReferenceIndex> analytic_reference() const {
    return std::nullopt;
  }

 protected:
  void check_support(std::span<const double> x,
                     std::span<const double> z) const;

  ModelDescriptor descriptor_;
};

// Ground-truth indices; throws Unsupported when the model has none.
ReferenceIndex reference_index(const Model& model);

// Built-in models by name: "linear-gaussian", "ishigami", "heston".
// overrides maps parameter names to values; unknown names are rejected.
std::unique_ptr<Model> make_model(
    const std::string& name, const std::map<std::string, double>& overrides = {});

// Names accepted by make_model.
std::vector<std::string> builtin_model_names();

}  // namespace mfsobol
