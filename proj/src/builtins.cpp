#include "fairdyn/builtins.hpp"

#include <algorithm>
#include <cmath>

namespace fairdyn {

DynamicsSpec constant_dynamics(double c0, double c1) {
  return DynamicsSpec(
      "constant", [c0](double, double) { return c0; }, [c1](double, double) { return c1; }, 0.0, 0.0);
}

DynamicsSpec identity_dynamics() {
  return DynamicsSpec(
      "identity", [](double, double) { return 0.0; }, [](double, double) { return 1.0; }, 0.0, 0.0);
}

double AffineResponse::lipschitz() const { return std::max(std::abs(k0), std::abs(k1)); }

DynamicsSpec affine_dynamics(const AffineResponse& f0, const AffineResponse& f1) {
  return DynamicsSpec("affine", f0, f1, f0.lipschitz(), f1.lipschitz());
}

DynamicsSpec appendix_c_dynamics() {
  auto f1 = [](double b0, double b1) {
    return 0.5 * (b1 + b1 / 5) / 1.4 + std::exp(-0.000000001 * (b0 + b1)) * std::sin(18 * (b0 + b1)) + 0.1;
  };
  auto f0 = [](double, double b1) { return (b1 + b1 / 5) / 1.2 + 0.01; };
  return DynamicsSpec("appendixC", f0, f1);
}

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"constant", {"f0.const", "f1.const"}},
      {"identity", {}},
      {"affine", {"f0.const", "f0.b0", "f0.b1", "f1.const", "f1.b0", "f1.b1"}},
      {"appendixC", {}},
  };
  return catalog;
}

bool is_builtin(const std::string& name) {
  const auto& cat = builtin_catalog();
  return std::any_of(cat.begin(), cat.end(), [&](const BuiltinInfo& b) { return b.name == name; });
}

DynamicsSpec make_builtin(const std::string& name, const std::map<std::string, double>& params) {
  const auto& cat = builtin_catalog();
  const auto it = std::find_if(cat.begin(), cat.end(), [&](const BuiltinInfo& b) { return b.name == name; });
  if (it == cat.end()) throw ValidationError("unknown builtin dynamics '" + name + "'");
  for (const auto& key : it->params)
    if (!params.count(key)) throw ValidationError("builtin '" + name + "' requires parameter '" + key + "'");
  for (const auto& [key, value] : params)
    if (std::find(it->params.begin(), it->params.end(), key) == it->params.end())
      throw ValidationError("builtin '" + name + "' does not take parameter '" + key + "'");

  if (name == "constant") return constant_dynamics(params.at("f0.const"), params.at("f1.const"));
  if (name == "identity") return identity_dynamics();
  if (name == "affine")
    return affine_dynamics({params.at("f0.const"), params.at("f0.b0"), params.at("f0.b1")},
                           {params.at("f1.const"), params.at("f1.b0"), params.at("f1.b1")});
  return appendix_c_dynamics();
}

}  // namespace fairdyn
