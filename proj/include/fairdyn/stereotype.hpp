#pragma once

// Estimation errors in a group's qualified fraction (stereotypes) and the
// policy an institution actually implements when it acts on biased estimates.

#include <stdexcept>
#include <vector>

#include "fairdyn/dynamics.hpp"

namespace fairdyn {

class StereotypeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct StereotypeSpec {
  double epsA = 0.0;
  double epsB = 0.0;
};

// Throws StereotypeError unless -pi_j <= eps_j <= 1 - pi_j for both groups and
// eps_dis - eps_adv <= pi_adv - pi_dis.
void validate_stereotype(const PopulationState& state, const StereotypeSpec& eps);

// Implemented policy when the institution runs `mode` on pi + eps.
PolicyDecision effective_decision(PolicyMode mode, const PopulationState& state, const UtilitySpec& u,
                                  const StereotypeSpec& eps);
Policy effective_policy(PolicyMode mode, const PopulationState& state, const UtilitySpec& u,
                        const StereotypeSpec& eps);

// Deterministic per-step errors. Entry k applies on [k, k+1); the last entry
// persists.
class StereotypeSchedule {
 public:
  StereotypeSchedule() : entries_{StereotypeSpec{}} {}
  explicit StereotypeSchedule(StereotypeSpec constant) : entries_{constant} {}
  explicit StereotypeSchedule(std::vector<StereotypeSpec> entries);

  const StereotypeSpec& at(double t) const;
  const std::vector<StereotypeSpec>& entries() const { return entries_; }
  bool is_constant() const { return entries_.size() == 1; }

 private:
  std::vector<StereotypeSpec> entries_;
};

PolicyProvider make_stereotype_provider(PolicyMode mode, const UtilitySpec& u, const StereotypeSchedule& schedule);

TrajectoryRecord stereotype_dt_trajectory(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                                          const DynamicsSpec& dyn, const StereotypeSchedule& schedule, long steps,
                                          const DtOptions& opts = {});
TrajectoryRecord stereotype_ct_trajectory(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                                          const DynamicsSpec& dyn, const StereotypeSchedule& schedule, double tEnd,
                                          double h = kDefaultStepSize, const CtOptions& opts = {});

}  // namespace fairdyn
