#pragma once

// Influence dynamics: how selection rates observed within a group move that
// group's qualified fraction, in discrete time (DT) and continuous time (CT).

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairdyn/core.hpp"
#include "fairdyn/policy.hpp"

namespace fairdyn {

// A response rate as a function of a group's per-evaluation selection rates
// (beta(0), beta(1)). Must be pure; it is evaluated concurrently.
using ResponseFn = std::function<double(double b0, double b1)>;

struct Response {
  double f0;
  double f1;
  int clamps;  // how many of the two raw outputs fell outside [0,1]
};

class DynamicsSpec {
 public:
  DynamicsSpec(std::string name, ResponseFn f0, ResponseFn f1, std::optional<double> declaredL0 = std::nullopt,
               std::optional<double> declaredL1 = std::nullopt);

  const std::string& name() const { return name_; }
  const std::optional<double>& declaredL0() const { return l0_; }
  const std::optional<double>& declaredL1() const { return l1_; }
  bool has_declared_constants() const { return l0_.has_value() && l1_.has_value(); }

  double raw_f0(double b0, double b1) const { return f0_(b0, b1); }
  double raw_f1(double b0, double b1) const { return f1_(b0, b1); }

  // Outputs clamped to [0,1].
  Response respond(double b0, double b1) const;
  double f0(double b0, double b1) const { return respond(b0, b1).f0; }
  double f1(double b0, double b1) const { return respond(b0, b1).f1; }

  // One-dimensional map induced by the unconstrained policy:
  // pi f1(0,pi) + (1-pi) f0(0,pi).
  double un_map(double pi) const;

 private:
  std::string name_;
  ResponseFn f0_;
  ResponseFn f1_;
  std::optional<double> l0_;
  std::optional<double> l1_;
};

struct LipschitzCheck {
  bool ok = true;
  double maxRatioF0 = 0.0;
  double maxRatioF1 = 0.0;
};

// Largest sampled l1 finite-difference ratios of the clamped f0, f1 on a
// (resolution+1)^2 grid, compared against declared constants (+1e-6).
LipschitzCheck check_declared_lipschitz(const DynamicsSpec& dyn, int resolution = 256);

enum class PolicyMode { UN, AA, AA1, AA2 };
enum class TimeMode { DT, CT };
enum class CaseTag : std::uint8_t { UN, AA1, AA2, Boundary };

const char* to_string(PolicyMode m);
const char* to_string(TimeMode m);
const char* to_string(CaseTag c);
PolicyMode parse_policy_mode(const std::string& s);
TimeMode parse_time_mode(const std::string& s);

struct PolicyDecision {
  Policy policy;
  CaseTag tag = CaseTag::UN;
};

// Chooses the policy applied at a state; t is the simulation time.
using PolicyProvider = std::function<PolicyDecision(const PopulationState& state, double t)>;

// UN: unconstrained. AA: optimal parity policy (AA1 or AA2 per utilities).
// AA1 / AA2: that parity form regardless of utilities.
PolicyDecision decide_policy(PolicyMode mode, const PopulationState& state, const UtilitySpec& u);
PolicyProvider make_policy_provider(PolicyMode mode, const UtilitySpec& u);

struct GroupRates {
  double beta0 = 0.0;
  double beta1 = 0.0;
};

GroupRates rates_for(const SelectionRates& rates, Group g);

struct StepOutcome {
  QualificationProfile next;
  int clamps = 0;
};

// p1' = clamp(p1 f1(beta) + (1 - p1) f0(beta), 0, 1)
StepOutcome dt_step(const QualificationProfile& profile, const GroupRates& rates, const DynamicsSpec& dyn);

// Right-hand side of the CT dynamics for both groups under a fixed policy.
struct CtDerivative {
  double dA = 0.0;
  double dB = 0.0;
  int clamps = 0;
};
CtDerivative ct_derivative(const PopulationState& state, const Policy& policy, const DynamicsSpec& dyn);

enum EventFlag : std::uint32_t {
  kEventCaseSwitch = 1u << 0,
  kEventClamp = 1u << 1,
  kEventCrossing = 1u << 2,
  kEventMerge = 1u << 3,
  kEventStepHalving = 1u << 4,
};

std::string event_flags_to_string(std::uint32_t flags);

struct TrajectoryEvent {
  double time;
  EventFlag kind;
};

struct TrajectoryRecord {
  TimeMode timeMode = TimeMode::DT;
  PolicyMode mode = PolicyMode::UN;
  std::vector<double> times;
  std::vector<PopulationState> states;
  std::vector<Policy> policies;
  std::vector<CaseTag> cases;
  std::vector<double> perStepUtility;
  std::vector<double> runningUtility;  // cumulative utility up to each row
  std::vector<double> delta;
  std::vector<double> qualifiedRateGap;  // |beta(1;A) - beta(1;B)|
  std::vector<std::uint32_t> flags;
  std::vector<TrajectoryEvent> events;
  std::vector<std::string> warnings;
  double cumulativeUtility = 0.0;
  double endTime = 0.0;
  std::optional<PopulationState> endState;  // state at the horizon, sampled or not
  long clampCount = 0;
  long caseSwitches = 0;
  bool stepHalvingOk = true;
  double stepHalvingError = 0.0;

  std::size_t size() const { return times.size(); }
  const PopulationState& final_state() const { return *endState; }
};

class CaseSwitchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DtOptions {
  bool strict = false;  // throw CaseSwitchError on an AA1 <-> AA2 switch
};

TrajectoryRecord dt_trajectory(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                               const DynamicsSpec& dyn, long steps, const DtOptions& opts = {});
TrajectoryRecord dt_trajectory_with(const PolicyProvider& provider, PolicyMode modeTag,
                                    const PopulationState& state0, const UtilitySpec& u, const DynamicsSpec& dyn,
                                    long steps, const DtOptions& opts = {});

inline constexpr double kDefaultStepSize = 1e-3;
inline constexpr double kMergeTol = 1e-10;
inline constexpr double kStepHalvingTol = 1e-6;

struct CtOptions {
  double sampleEvery = 0.0;  // <= 0: store every integration step
  bool verifyStepHalving = true;
  bool strict = false;  // throw on case switch or failed step-halving check
};

TrajectoryRecord ct_integrate(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                              const DynamicsSpec& dyn, double tEnd, double h = kDefaultStepSize,
                              const CtOptions& opts = {});
TrajectoryRecord ct_integrate_with(const PolicyProvider& provider, PolicyMode modeTag,
                                   const PopulationState& state0, const UtilitySpec& u, const DynamicsSpec& dyn,
                                   double tEnd, double h = kDefaultStepSize, const CtOptions& opts = {});

// Endpoint of the CT flow only (no recording); n steps of size tEnd/n.
PopulationState ct_endpoint(const PolicyProvider& provider, const PopulationState& state0, const DynamicsSpec& dyn,
                            double tEnd, long n);

struct UtilityBracket {
  double finiteIntegral = 0.0;     // integral of U_t over the recorded horizon
  double deltaCoefficient = 0.0;   // k in U_t = u(1) pi_adv - k * Delta_t
  double deltaTailLower = 0.0;     // bounds on the integral of Delta from tEnd to infinity
  double deltaTailUpper = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Infinite-horizon utility of a CT run, relative to the advantaged group's
// common utility stream beyond tEnd: the finite-horizon integral minus
// k * integral_{tEnd}^{inf} Delta_t, with that tail bracketed by the
// exponential envelopes Delta_T e^{-(t-T)(1 +- L)}.
UtilityBracket cumulative_utility_with_tail(const TrajectoryRecord& record, double L, const UtilitySpec& u,
                                            double gA);

}  // namespace fairdyn
