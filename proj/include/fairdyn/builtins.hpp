#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairdyn/dynamics.hpp"

namespace fairdyn {

// f0 = c0, f1 = c1 everywhere.
DynamicsSpec constant_dynamics(double c0, double c1);

// f1 = 1, f0 = 0: every profile is a fixed point.
DynamicsSpec identity_dynamics();

struct AffineResponse {
  double c = 0.0;   // constant
  double k0 = 0.0;  // coefficient of beta(0)
  double k1 = 0.0;  // coefficient of beta(1)

  double operator()(double b0, double b1) const { return c + k0 * b0 + k1 * b1; }
  // l1 Lipschitz constant of an affine map.
  double lipschitz() const;
};

// Affine f0, f1 with declared constants max(|k0|, |k1|).
DynamicsSpec affine_dynamics(const AffineResponse& f0, const AffineResponse& f1);

// Three-equilibrium example:
//   f1 = 0.5 (b1 + b1/5) / 1.4 + exp(-1e-9 (b0 + b1)) sin(18 (b0 + b1)) + 0.1
//   f0 = (b1 + b1/5) / 1.2 + 0.01
DynamicsSpec appendix_c_dynamics();

// Registry of named built-ins used by scenario files.
struct BuiltinInfo {
  std::string name;
  std::vector<std::string> params;  // ordered parameter keys
};

const std::vector<BuiltinInfo>& builtin_catalog();
bool is_builtin(const std::string& name);
// Throws ValidationError for unknown names or missing/extra parameters.
DynamicsSpec make_builtin(const std::string& name, const std::map<std::string, double>& params);

}  // namespace fairdyn
