#pragma once

// Scenario execution behind the command-line tool: trajectories, analysis
// reports, policy comparisons, gradient fields and the verification suite.

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "fairdyn/analysis.hpp"
#include "fairdyn/io.hpp"
#include "fairdyn/scenario.hpp"
#include "json.hpp"

namespace fairdyn {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitInvalidScenario = 2,
  kExitStrictWarning = 3,
  kExitStereotype = 4,
  kExitVerifyFailed = 5,
};

// Maps an exception raised by the library to the tool's exit status.
int exit_code_for(const std::exception& e);

struct RunOptions {
  std::string outDir = ".";
  bool strict = false;
  int resolution = 0;  // > 0 overrides grid resolutions
  kernels::Exec exec = kernels::Exec::Parallel;
};

// The scenario's trajectory (stereotype schedule applied when present).
TrajectoryRecord simulate(const Scenario& s, bool strict = false);

FieldGrid export_field(const DynamicsSpec& dyn, PolicyMode mode, const UtilitySpec& u, double gA, int resolution = 41,
                       kernels::Exec exec = kernels::Exec::Parallel);

nlohmann::ordered_json analyze(const Scenario& s, int resolution = 256,
                               kernels::Exec exec = kernels::Exec::Parallel);

struct ComparisonEntry {
  PolicyMode mode = PolicyMode::UN;
  double cumulativeUtility = 0.0;
  double finalPiA = 0.0;
  double finalPiB = 0.0;
  long caseSwitches = 0;
};

struct Comparison {
  std::vector<ComparisonEntry> entries;  // UN, AA1, AA2
  bool unAtLeastAA1 = false;             // UN >= AA1 - 1e-9
};

Comparison compare_policies(const Scenario& s, bool strict = false);
nlohmann::ordered_json to_json(const Comparison& c);

struct ArtifactSet {
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

// Writes every output the scenario requests into opts.outDir.
ArtifactSet run_scenario(const Scenario& s, const RunOptions& opts);

struct VerifyLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyLine> lines;
  bool all_passed() const;
};

// Randomized property sweeps. Instance i draws from an RNG seeded by
// (seed, i), so serial and parallel execution see identical instances.
VerifyReport run_verify(std::uint64_t seed, int instances = 2000, kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace fairdyn
