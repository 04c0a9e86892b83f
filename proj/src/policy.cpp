#include "fairdyn/policy.hpp"

#include <array>
#include <cmath>

namespace fairdyn {

const char* to_string(AATag tag) {
  switch (tag) {
    case AATag::AA1: return "AA1";
    case AATag::AA2: return "AA2";
    case AATag::Boundary: return "BOUNDARY";
  }
  return "?";
}

Group advantaged_group(const PopulationState& state) {
  return state.piA().p1() >= state.piB().p1() ? Group::A : Group::B;
}

AACase determine_aa_case(const PopulationState& state, const UtilitySpec& u) {
  const Group adv = advantaged_group(state);
  const double g = state.share(adv);
  const double s = g * u.u1() + (1.0 - g) * u.u0();
  AATag tag = AATag::Boundary;
  if (s < 0.0) tag = AATag::AA1;
  else if (s > 0.0) tag = AATag::AA2;
  return {tag, adv};
}

PolicySolution unconstrained_policy(const PopulationState& state, const UtilitySpec& u) {
  PolicySolution s;
  s.policy = Policy::make(1.0, 0.0, 1.0, 0.0);
  s.achievedUtility = utility(state, s.policy, u);
  return s;
}

namespace {

Policy assemble(Group adv, double tau1Adv, double tau0Adv, double tau1Dis, double tau0Dis) {
  if (adv == Group::A) return Policy::make(tau1Adv, tau0Adv, tau1Dis, tau0Dis);
  return Policy::make(tau1Dis, tau0Dis, tau1Adv, tau0Adv);
}

}  // namespace

Policy aa1_policy(const PopulationState& state, Group advantaged) {
  const double pAdv = state.profile(advantaged).p1();
  const double pDis = state.profile(other(advantaged)).p1();
  // pAdv == 0 forces pDis == 0: any tau(1;adv) is parity-feasible.
  const double tau1Adv = pAdv > 0.0 ? pDis / pAdv : 1.0;
  return assemble(advantaged, tau1Adv, 0.0, 1.0, 0.0);
}

Policy aa2_policy(const PopulationState& state, Group advantaged) {
  const double pAdv = state.profile(advantaged).p1();
  const double pDis = state.profile(other(advantaged)).p1();
  // pDis == 1 forces pAdv == 1: nothing unqualified left to admit.
  const double tau0Dis = pDis < 1.0 ? (pAdv - pDis) / (1.0 - pDis) : 0.0;
  return assemble(advantaged, 1.0, 0.0, 1.0, tau0Dis);
}

PolicySolution aa_policy(const PopulationState& state, const UtilitySpec& u) {
  PolicySolution s;
  const AACase c = determine_aa_case(state, u);
  s.aaCase = c;
  s.policy = c.resolved() == AATag::AA1 ? aa1_policy(state, c.advantaged) : aa2_policy(state, c.advantaged);
  s.achievedUtility = utility(state, s.policy, u);
  return s;
}

namespace {

// Coordinates ordered (tau1A, tau1B, tau0A, tau0B).
using Vertex = std::array<double, 4>;

Policy to_policy(const Vertex& x) { return Policy::make(x[0], x[2], x[1], x[3]); }

// Larger key wins a utility tie: select qualified eagerly, unqualified reluctantly.
bool preferred_on_tie(const Vertex& a, const Vertex& b) {
  const std::array<double, 4> ka{a[0], a[1], -a[2], -a[3]};
  const std::array<double, 4> kb{b[0], b[1], -b[2], -b[3]};
  return ka > kb;
}

constexpr double kTieTol = 1e-14;

}  // namespace

PolicySolution lp_oracle(const PopulationState& state, const UtilitySpec& u, bool parityConstrained) {
  const double pA = state.piA().p1();
  const double pB = state.piB().p1();
  // beta(A) - beta(B) as a linear form in the coordinates.
  const Vertex parity{pA, -pB, 1.0 - pA, -(1.0 - pB)};

  bool haveBest = false;
  Vertex best{};
  double bestU = 0.0;

  auto consider = [&](const Vertex& x) {
    const double val = utility(state, to_policy(x), u);
    if (!haveBest || val > bestU + kTieTol || (std::abs(val - bestU) <= kTieTol && preferred_on_tie(x, best))) {
      haveBest = true;
      best = x;
      bestU = val;
    }
  };

  auto residual = [&](const Vertex& x) {
    double r = 0.0;
    for (int k = 0; k < 4; ++k) r += parity[k] * x[k];
    return r;
  };

  // Box corners: all vertices of the unconstrained problem, and the
  // constrained vertices that happen to satisfy parity at a corner.
  for (int mask = 0; mask < 16; ++mask) {
    Vertex x{};
    for (int k = 0; k < 4; ++k) x[k] = (mask >> k) & 1 ? 1.0 : 0.0;
    if (!parityConstrained || std::abs(residual(x)) <= kProbTol) consider(x);
  }

  if (parityConstrained) {
    // Three coordinates at bounds, the fourth solved from the equality.
    for (int free = 0; free < 4; ++free) {
      if (parity[free] == 0.0) continue;
      for (int mask = 0; mask < 8; ++mask) {
        Vertex x{};
        int bit = 0;
        for (int k = 0; k < 4; ++k) {
          if (k == free) continue;
          x[k] = (mask >> bit++) & 1 ? 1.0 : 0.0;
        }
        x[free] = 0.0;
        const double v = -residual(x) / parity[free];
        if (v < -kProbTol || v > 1.0 + kProbTol) continue;
        x[free] = std::fmin(1.0, std::fmax(0.0, v));
        consider(x);
      }
    }
  }

  PolicySolution s;
  s.policy = to_policy(best);
  s.achievedUtility = utility(state, s.policy, u);
  return s;
}

}  // namespace fairdyn
