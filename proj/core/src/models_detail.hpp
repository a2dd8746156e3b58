#pragma once

#include <map>
#include <memory>
#include <string>

#include "mfsobol/errors.hpp"
#include "mfsobol/model.hpp"

namespace mfsobol::detail {

// Consumes entries of a parameter-override map; leftovers are unknown keys
// and rejected wholesale, so typos never pass silently.
class ParamReader {
 public:
  explicit ParamReader(std::map<std::string, double> overrides)
      : pending_(std::move(overrides)) {}

  double take(const std::string& key, double fallback) {
    const auto it = pending_.find(key);
    if (it == pending_.end()) {
      return fallback;
    }
    const double v = it->second;
    pending_.erase(it);
    return v;
  }

  bool take_flag(const std::string& key, bool fallback) {
    return take(key, fallback ? 1.0 : 0.0) != 0.0;
  }

  void finish(const std::string& model_name) const {
    if (!pending_.empty()) {
      throw InvalidParams("unknown parameter '" + pending_.begin()->first +
                          "' for model '" + model_name + "'");
    }
  }

 private:
  std::map<std::string, double> pending_;
};

std::unique_ptr<Model> make_heston_model(
    const std::map<std::string, double>& overrides);

}  // namespace mfsobol::detail
