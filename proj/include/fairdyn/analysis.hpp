#pragma once

// Numerical checks of equality and utility conditions for given dynamics:
// grid estimates of contraction constants, the fixed-point structure of the
// unconstrained map, convergence envelopes and theorem-level verdicts.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairdyn/dynamics.hpp"
#include "fairdyn/kernels.hpp"

namespace fairdyn {

inline constexpr double kContractivityMargin = 1e-6;
inline constexpr int kMinGridResolution = 64;

enum class ContractionMethod { Grid, GridWithDeclaredConstants };
const char* to_string(ContractionMethod m);

struct ContractionReport {
  // Grid maxima. They bound the true suprema from below.
  double lUN = 0.0;
  double lAA1 = 0.0;
  double lAA2 = 0.0;
  // Present only with declared constants: grid maxima + (L0 + L1) * cell diameter.
  std::optional<double> lUNUpper, lAA1Upper, lAA2Upper;
  double L0 = 0.0;
  double L1 = 0.0;
  int gridResolution = 0;
  ContractionMethod method = ContractionMethod::Grid;
  // estimate (or upper bound, when available) < 1 - kContractivityMargin
  bool isContractiveUN = false;
  bool isContractiveAA1 = false;
  bool isContractiveAA2 = false;

  // Upper bound when available, else the grid estimate.
  double boundUN() const { return lUNUpper.value_or(lUN); }
  double boundAA1() const { return lAA1Upper.value_or(lAA1); }
  double boundAA2() const { return lAA2Upper.value_or(lAA2); }
};

ContractionReport estimate_contraction(const DynamicsSpec& dyn, int resolution = 256,
                                       kernels::Exec exec = kernels::Exec::Parallel);

struct StatusQuoCheck {
  bool holds = true;
  std::optional<std::pair<double, double>> counterexample;  // first (b0, b1) in row-major scan order
};

// f1(x,y) >= f0(x,y) - 1e-12 on the (resolution+1)^2 grid.
StatusQuoCheck check_status_quo_bias(const DynamicsSpec& dyn, int resolution = 256,
                                     kernels::Exec exec = kernels::Exec::Parallel);

struct EquilibriumPoint {
  double pi = 0.0;
  double residual = 0.0;    // |f(pi) - pi|
  double slope = 0.0;       // d f / d pi
  double localRate = 0.0;   // max(0, sup of df/dpi) on [pi - radius, pi + radius]
  double radius = 0.0;
};

struct EquilibriumAtlas {
  TimeMode mode = TimeMode::CT;
  std::vector<EquilibriumPoint> attracting;  // sorted
  std::vector<EquilibriumPoint> unstable;    // sorted, includes unstable endpoints
  bool kValid = false;
  bool degenerateContinuum = false;
  std::vector<std::string> notes;

  // Index of the attracting point whose basin contains pi; -1 on a delimiter.
  int basin_of(double pi) const;
  std::size_t k() const { return attracting.size(); }
};

inline constexpr int kDefaultScanCells = 4096;

EquilibriumAtlas find_equilibria(const DynamicsSpec& dyn, TimeMode mode, int cells = kDefaultScanCells,
                                 kernels::Exec exec = kernels::Exec::Parallel);

struct DeltaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// CT: delta0 e^{-t(1+L)} .. delta0 e^{-t(1-L)}. DT: 0 .. 2 delta0 L^t.
DeltaBounds delta_bounds(double L, double delta0, double t, TimeMode mode);

struct Theorem2Verdict {
  double alpha = 0.0;
  double lowerThreshold = 0.0;  // lUN must be >= this (1 - alpha)
  double upperThreshold = 0.0;  // lAA2 must be <= this (1 + (lUN - 1) / alpha)
  bool lowerOK = false;
  bool upperOK = false;
  bool applies = false;  // both conditions hold and both constants are < 1
};

Theorem2Verdict theorem2_verdict(double lUN, double lAA2, double gA, const UtilitySpec& u);

struct ModeLimit {
  PolicyMode mode = PolicyMode::UN;
  double piA = 0.0;
  double piB = 0.0;
  bool converged = false;
  double time = 0.0;
  double utilityAtLimit = 0.0;
  bool equalized = false;  // |piA - piB| < 1e-6
};

struct Theorem4Options {
  double h = kDefaultStepSize;
  double chunk = 5.0;     // convergence is tested every `chunk` time units
  double tCap = 1000.0;
  double derivativeTol = 1e-10;
  double limitTol = 1e-6;
};

struct Theorem4Comparison {
  EquilibriumAtlas atlas;
  Group advantaged = Group::A;
  int basinA = -1;
  int basinB = -1;
  ModeLimit un, aa1, aa2;
  bool unMatches = false;               // UN limit = (e[basinA], e[basinB])
  bool aa1Matches = false;              // AA1 limit = e[disadvantaged basin] for both groups
  std::optional<bool> aa2Matches;       // only when AA2 equalizes
  bool allConverged = false;
  bool utilityOrderingHolds = true;     // AA1 <= UN <= AA2 (+1e-9), when AA2 equalizes
  std::vector<std::string> notes;
};

Theorem4Comparison theorem4_limits(const DynamicsSpec& dyn, const PopulationState& state0, const UtilitySpec& u,
                                   const Theorem4Options& opts = {});

struct Prop3Persistence {
  bool aa1UnderA = false;  // g_A u1 + (1 - g_A) u0 <= 0
  bool aa1UnderB = false;
  bool aa2UnderA = false;  // g_A u1 + (1 - g_A) u0 >= 0
  bool aa2UnderB = false;
  bool alwaysAA1 = false;
  bool alwaysAA2 = false;
};

Prop3Persistence prop3_case_persistence(double gA, const UtilitySpec& u);

}  // namespace fairdyn
