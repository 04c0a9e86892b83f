#pragma once

// One-step utility-maximizing policies: unconstrained (UN) and under
// demographic parity (AA1 under-acceptance / AA2 over-acceptance), plus an
// exact vertex-enumeration LP solver used to cross-check the closed forms.

#include <optional>

#include "fairdyn/core.hpp"

namespace fairdyn {

enum class AATag { AA1, AA2, Boundary };

const char* to_string(AATag tag);

struct AACase {
  AATag tag;
  Group advantaged;

  // Boundary resolves to AA2.
  AATag resolved() const { return tag == AATag::AA1 ? AATag::AA1 : AATag::AA2; }
};

struct PolicySolution {
  Policy policy;
  std::optional<AACase> aaCase;  // empty for UN and oracle solutions
  double achievedUtility = 0.0;
};

// Group with the larger qualified fraction; ties go to A.
Group advantaged_group(const PopulationState& state);

// Sign of g_adv u(1) + (1 - g_adv) u(0).
AACase determine_aa_case(const PopulationState& state, const UtilitySpec& u);

PolicySolution unconstrained_policy(const PopulationState& state, const UtilitySpec& u);

// Closed-form AA1 policy for the given advantaged group (regardless of utilities).
Policy aa1_policy(const PopulationState& state, Group advantaged);
// Closed-form AA2 policy for the given advantaged group.
Policy aa2_policy(const PopulationState& state, Group advantaged);

PolicySolution aa_policy(const PopulationState& state, const UtilitySpec& u);

// Exact maximizer of the one-step utility over tau in [0,1]^4 by enumerating
// basic feasible solutions; optionally subject to equal aggregate selection
// rates. Among utility ties, prefers larger tau(1;A), tau(1;B), then smaller
// tau(0;A), tau(0;B).
PolicySolution lp_oracle(const PopulationState& state, const UtilitySpec& u, bool parityConstrained);

}  // namespace fairdyn
