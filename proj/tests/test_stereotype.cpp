#include <random>

#include "doctest.h"
#include "fairdyn/builtins.hpp"
#include "fairdyn/stereotype.hpp"

using namespace fairdyn;

TEST_CASE("zero errors reproduce the unbiased policies") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const PopulationState s(i % 10 == 0 ? 1.0 : unit(rng), i % 15 == 0 ? 0.0 : unit(rng), 0.05 + 0.9 * unit(rng));
    const UtilitySpec u(-2 * unit(rng), 2 * unit(rng));
    for (PolicyMode m : {PolicyMode::UN, PolicyMode::AA, PolicyMode::AA1, PolicyMode::AA2}) {
      const PolicyDecision a = effective_decision(m, s, u, {});
      const PolicyDecision b = decide_policy(m, s, u);
      CHECK(a.policy == b.policy);
      CHECK(a.tag == b.tag);
    }
  }
}

TEST_CASE("unconstrained policy under stereotypes") {
  const PopulationState s(0.5, 0.3, 0.5);
  const Policy neg = effective_policy(PolicyMode::UN, s, UtilitySpec(-1, 1), {-0.1, 0.0});
  CHECK(neg.tau(1, Group::A) == doctest::Approx(0.8));
  CHECK(neg.tau(0, Group::A) == 0.0);
  const Policy pos = effective_policy(PolicyMode::UN, s, UtilitySpec(-1, 1), {0.0, 0.1});
  CHECK(pos.tau(1, Group::B) == 1.0);
  CHECK(pos.tau(0, Group::B) == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("aa1 table rows") {
  const PopulationState s(0.8, 0.4, 0.5);
  const UtilitySpec u(-2, 1);
  const Policy p = effective_policy(PolicyMode::AA, s, u, {-0.05, -0.1});
  CHECK(p.tau(1, Group::A) == doctest::Approx(0.375));
  CHECK(p.tau(1, Group::B) == doctest::Approx(0.75));
  CHECK(p.tau(0, Group::A) == 0.0);
  CHECK(p.tau(0, Group::B) == 0.0);

  const Policy q = effective_policy(PolicyMode::AA1, s, u, {0.1, 0.1});
  CHECK(q.tau(1, Group::A) == doctest::Approx(0.625));
  CHECK(q.tau(1, Group::B) == 1.0);
  CHECK(q.tau(0, Group::B) == doctest::Approx(0.1 / 0.6));

  // Positive errors large enough to saturate the advantaged group's rate.
  const Policy capped = effective_policy(PolicyMode::AA1, s, u, {0.2, 0.5});
  CHECK(capped.tau(1, Group::A) == 1.0);
}

TEST_CASE("aa2 table rows") {
  const PopulationState s(0.8, 0.4, 0.5);
  const UtilitySpec u(-1, 2);
  const Policy p = effective_policy(PolicyMode::AA, s, u, {-0.1, 0.05});
  CHECK(p.tau(1, Group::A) == doctest::Approx(0.7 / 0.8));
  CHECK(p.tau(0, Group::A) == 0.0);
  CHECK(p.tau(1, Group::B) == 1.0);
  CHECK(p.tau(0, Group::B) == doctest::Approx((0.4 - 0.1 - 0.05) / 0.6));
  const Policy q = effective_policy(PolicyMode::AA2, s, u, {0.1, -0.1});
  CHECK(q.tau(0, Group::A) == doctest::Approx(0.5));
  CHECK(q.tau(0, Group::B) == doctest::Approx(0.6 / 0.6));
}

TEST_CASE("mirrored roles when B is advantaged") {
  const PopulationState s(0.4, 0.8, 0.5);
  const Policy p = effective_policy(PolicyMode::AA1, s, UtilitySpec(-2, 1), {-0.1, -0.05});
  CHECK(p.tau(1, Group::B) == doctest::Approx(0.375));
  CHECK(p.tau(1, Group::A) == doctest::Approx(0.75));
}

TEST_CASE("validity checks") {
  const PopulationState s(0.8, 0.4, 0.5);
  const UtilitySpec u(-1, 1);
  CHECK_THROWS_AS(effective_policy(PolicyMode::UN, s, u, {0.3, 0.0}), StereotypeError);
  CHECK_THROWS_AS(effective_policy(PolicyMode::UN, s, u, {0.0, -0.5}), StereotypeError);
  // The error may not flip which group looks advantaged.
  CHECK_THROWS_AS(effective_policy(PolicyMode::AA1, s, u, {-0.3, 0.2}), StereotypeError);
  CHECK_NOTHROW(effective_policy(PolicyMode::AA1, s, u, {-0.2, 0.2}));
  CHECK_THROWS_AS(effective_policy(PolicyMode::UN, PopulationState(0.0, 0.0, 0.5), u, {-0.1, 0.0}),
                  StereotypeError);
}

TEST_CASE("effective policies stay inside the unit box") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const PopulationState s(unit(rng), unit(rng), 0.5);
    const double eA = unit(rng) - s.piA().p1();
    const double eB = unit(rng) - s.piB().p1();
    for (PolicyMode m : {PolicyMode::UN, PolicyMode::AA1, PolicyMode::AA2}) {
      try {
        const Policy p = effective_policy(m, s, UtilitySpec(-1, 1), {eA, eB});
        for (int v = 0; v < 2; ++v)
          for (Group g : {Group::A, Group::B}) CHECK((p.tau(v, g) >= 0.0 && p.tau(v, g) <= 1.0));
        ++checked;
      } catch (const StereotypeError&) {
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("schedules") {
  const StereotypeSchedule s({{0.0, -0.1}, {0.0, -0.2}});
  CHECK(s.at(0.0).epsB == -0.1);
  CHECK(s.at(0.5).epsB == -0.1);
  CHECK(s.at(1.0).epsB == -0.2);
  CHECK(s.at(40.0).epsB == -0.2);
  CHECK_THROWS_AS(StereotypeSchedule(std::vector<StereotypeSpec>{}), ValidationError);
}

TEST_CASE("zero-error trajectories are bit-identical") {
  const DynamicsSpec d = affine_dynamics({0.1, 0.2, 0.3}, {0.5, 0.1, 0.2});
  const PopulationState s0(0.9, 0.2, 0.4);
  const UtilitySpec u(-1, 1);
  for (PolicyMode m : {PolicyMode::UN, PolicyMode::AA, PolicyMode::AA1, PolicyMode::AA2}) {
    const TrajectoryRecord a = stereotype_dt_trajectory(s0, m, u, d, StereotypeSchedule{}, 40);
    const TrajectoryRecord b = dt_trajectory(s0, m, u, d, 40);
    CHECK(a.states == b.states);
    CHECK(a.perStepUtility == b.perStepUtility);
    const TrajectoryRecord c = stereotype_ct_trajectory(s0, m, u, d, StereotypeSchedule{}, 3.0);
    const TrajectoryRecord e = ct_integrate(s0, m, u, d, 3.0);
    CHECK(c.states == e.states);
    CHECK(c.runningUtility == e.runningUtility);
  }
}

TEST_CASE("negative stereotype against the disadvantaged group keeps qualified rates equal") {
  const DynamicsSpec d = affine_dynamics({0.1, 0.1, 0.2}, {0.6, 0.1, 0.1});
  const TrajectoryRecord r = stereotype_dt_trajectory(PopulationState(0.8, 0.3, 0.5), PolicyMode::AA1,
                                                      UtilitySpec(-1, 1), d, StereotypeSchedule({0.02, -0.05}), 60);
  for (double g : r.qualifiedRateGap) CHECK(g <= 1e-12);
  CHECK(std::abs(r.final_state().delta()) < 1e-6);
}

TEST_CASE("aa2 with errors favouring the disadvantaged group equalizes") {
  // L0 = L1 = 0.1 and |f1 - f0| <= 0.3, so lAA2 <= 2 * 0.1 + 0.3 < 1.
  const DynamicsSpec d = affine_dynamics({0.2, 0.1, 0.1}, {0.5, -0.1, 0.05});
  const PopulationState s0(0.85, 0.25, 0.5);
  const UtilitySpec u(-1, 2);
  // Errors must not exceed the shrinking gap, so they stop after a few steps.
  std::vector<StereotypeSpec> eps(3, StereotypeSpec{-0.002, 0.002});
  eps.push_back({0.0, 0.0});
  const TrajectoryRecord r = stereotype_dt_trajectory(s0, PolicyMode::AA2, u, d, StereotypeSchedule(eps), 80);
  CHECK(std::abs(r.final_state().delta()) < 1e-6);
}
