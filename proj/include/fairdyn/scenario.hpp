#pragma once

// Scenario files: a flat text format of [section] headers and key = value
// lines. Blank lines and lines starting with '#' are ignored.
//
//   [scenario]   name, mode (UN | AA | AA1 | AA2), time (DT | CT)
//   [dynamics]   builtin = <name> plus its parameters, or f0 = <expr>, f1 = <expr>;
//                optional L0, L1 (declared Lipschitz constants)
//   [state]      piA, piB, gA
//   [utility]    u0, u1
//   [run]        steps (DT) or tEnd, h, sampleEvery (CT)
//   [stereotype] epsA, epsB: one value or a comma-separated per-step list
//   [output]     trajectory, report, field (true | false), resolution

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "fairdyn/dynamics.hpp"
#include "fairdyn/stereotype.hpp"

namespace fairdyn {

struct DynamicsSource {
  std::string builtin;  // empty for expression dynamics
  std::map<std::string, double> params;
  std::string f0Expr;
  std::string f1Expr;
  std::optional<double> L0;
  std::optional<double> L1;

  bool is_builtin() const { return !builtin.empty(); }
  DynamicsSpec build() const;
};

struct OutputRequest {
  bool trajectory = true;
  bool report = true;
  bool field = false;
  int resolution = 41;
};

struct Scenario {
  std::string name = "scenario";
  PolicyMode mode = PolicyMode::UN;
  TimeMode timeMode = TimeMode::DT;
  DynamicsSource dynamics;
  double piA = 0.5;
  double piB = 0.5;
  double gA = 0.5;
  double u0 = -1.0;
  double u1 = 1.0;
  long steps = 100;
  double tEnd = 10.0;
  double h = kDefaultStepSize;
  double sampleEvery = 0.0;
  std::optional<StereotypeSchedule> stereotype;
  OutputRequest outputs;

  PopulationState initial_state() const { return {piA, piB, gA}; }
  UtilitySpec utility() const { return {u0, u1}; }
};

// Throws ValidationError with a line number on malformed input; the result
// is fully validated (dynamics build, core invariants, horizon).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Canonical text; parse_scenario(serialize_scenario(s)) reproduces it exactly.
std::string serialize_scenario(const Scenario& s);

void validate_scenario(const Scenario& s);

}  // namespace fairdyn
