// Acceptance criteria: one PASS/FAIL line each, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairdyn/analysis.hpp"
#include "fairdyn/builtins.hpp"
#include "fairdyn/expression.hpp"
#include "fairdyn/policy.hpp"
#include "fairdyn/stereotype.hpp"

using namespace fairdyn;

namespace {

// Tolerances and budgets.
constexpr double kUtilityAgreement = 1e-9;
constexpr double kParityResidual = 1e-12;
constexpr double kRateLawSlack = 1e-9;
constexpr double kCtExactness = 1e-6;
constexpr double kEnvelopeSlack = 1e-5;
constexpr double kEqualized = 1e-6;
constexpr double kUtilityOrder = 1e-9;
constexpr double kOrderSlack = 1e-8;
constexpr double kBracketSlack = 1e-6;
constexpr double kLimitMatch = 1e-6;
constexpr double kRateGap = 1e-12;
constexpr double kParserAgreement = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, double budgetSeconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budgetSeconds > 0 && secs > budgetSeconds) {
    o.pass = false;
    o.detail += " (over time budget)";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d %-34s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string kv(const char* k, double v) {
  std::ostringstream os;
  os << k << "=" << v;
  return os.str();
}

// Affine responses kept inside [0,1] on the unit square.
DynamicsSpec random_affine(std::mt19937_64& rng, double maxCoef) {
  std::uniform_real_distribution<double> coef(-maxCoef, maxCoef), unit(0.0, 1.0);
  auto make = [&] {
    AffineResponse r{0.0, coef(rng), coef(rng)};
    const double lo = std::max(0.0, -r.k0) + std::max(0.0, -r.k1);
    const double hi = 1.0 - std::max(0.0, r.k0) - std::max(0.0, r.k1);
    r.c = lo + (hi - lo) * unit(rng);
    return r;
  };
  const AffineResponse f0 = make();
  return affine_dynamics(f0, make());
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

Outcome closed_form_vs_oracle() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worstU = 0.0, worstR = 0.0;
  int aa1 = 0, aa2 = 0, boundary = 0, ties = 0;
  for (int i = 0; i < 10000; ++i) {
    const double gA = i % 50 == 0 ? 0.5 : 0.05 + 0.9 * unit(rng);
    double piA = unit(rng), piB = unit(rng);
    if (i % 20 == 1) piB = piA;
    const Group adv = piA >= piB ? Group::A : Group::B;
    const double g = adv == Group::A ? gA : 1.0 - gA;
    const double u1 = 0.1 + 2.0 * unit(rng);
    double u0 = -2.0 * unit(rng);
    if (i % 10 == 3) u0 = -g * u1 / (1.0 - g);
    if (i % 50 == 0) u0 = -u1;  // exact tie at equal shares
    const PopulationState s(piA, piB, gA);
    const UtilitySpec u(u0, u1);
    const PolicySolution closed = aa_policy(s, u);
    const PolicySolution lp = lp_oracle(s, u, true);
    worstU = std::max(worstU, std::abs(closed.achievedUtility - lp.achievedUtility));
    worstR = std::max(worstR, selection_rates(s, closed.policy).parity_residual());
    aa1 += closed.aaCase->tag == AATag::AA1;
    aa2 += closed.aaCase->tag == AATag::AA2;
    boundary += closed.aaCase->tag == AATag::Boundary;
    ties += piA == piB;
  }
  std::ostringstream os;
  os << kv("max|dU|", worstU) << " " << kv("maxResidual", worstR) << " AA1=" << aa1 << " AA2=" << aa2
     << " boundary=" << boundary << " equalProfiles=" << ties;
  return {worstU <= kUtilityAgreement && worstR <= kParityResidual && boundary > 0, os.str()};
}

Outcome rate_law() {
  const DynamicsSpec c = constant_dynamics(0.2, 0.8);
  const double L = 0.6;
  const ContractionReport rep = estimate_contraction(c, 64);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = -INFINITY;
  for (int k = 0; k < 100; ++k) {
    const PopulationState s0(unit(rng), unit(rng), 0.05 + 0.9 * unit(rng));
    const double d0 = std::abs(s0.delta());
    const TrajectoryRecord r = dt_trajectory(s0, PolicyMode::UN, UtilitySpec(-1, 1), c, 50);
    for (std::size_t t = 0; t < r.size(); ++t)
      worst = std::max(worst, std::abs(r.delta[t]) - 2.0 * d0 * std::pow(L, static_cast<double>(t)));
  }
  const bool lOk = std::abs(rep.lUN - L) <= 1e-12;
  return {worst <= kRateLawSlack && lOk, kv("max(|D_t| - 2 D0 L^t)", worst) + " " + kv("lUN", rep.lUN)};
}

Outcome ct_exactness() {
  const DynamicsSpec c = constant_dynamics(0.2, 0.8);
  const TrajectoryRecord r = ct_integrate(PopulationState(0.9, 0.9, 0.5), PolicyMode::UN, UtilitySpec(-1, 1), c,
                                          10.0, 1e-3);
  const double err = std::abs(r.final_state().piA().p1() - (0.5 + 0.4 * std::exp(-4.0)));
  return {err <= kCtExactness, kv("error", err)};
}

Outcome envelope() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int accepted = 0, draws = 0;
  double worst = -INFINITY;
  while (accepted < 100 && draws < 10000) {
    ++draws;
    const DynamicsSpec d = random_affine(rng, 0.45);
    const ContractionReport rep = estimate_contraction(d, 64);
    const double L = rep.boundUN();
    if (!(L < 1.0 - kContractivityMargin)) continue;
    ++accepted;
    const PopulationState s0(unit(rng), unit(rng), 0.05 + 0.9 * unit(rng));
    CtOptions o;
    o.sampleEvery = 0.1;
    o.verifyStepHalving = false;
    const TrajectoryRecord r = ct_integrate(s0, PolicyMode::UN, UtilitySpec(-1, 1), d, 20.0, 1e-3, o);
    const double d0 = std::abs(s0.delta());
    for (std::size_t i = 0; i < r.size(); ++i) {
      const DeltaBounds b = delta_bounds(L, d0, r.times[i], TimeMode::CT);
      const double dt = std::abs(r.delta[i]);
      worst = std::max({worst, (b.lower - kEnvelopeSlack) - dt, dt - (b.upper + kEnvelopeSlack)});
    }
  }
  std::ostringstream os;
  os << "instances=" << accepted << " draws=" << draws << " " << kv("worstViolation", worst);
  return {accepted == 100 && worst <= 0.0, os.str()};
}

Outcome aa1_dominance() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int accepted = 0, draws = 0, notEqualized = 0;
  double worstU = -INFINITY, worstOrder = INFINITY;
  while (accepted < 100 && draws < 10000) {
    ++draws;
    const DynamicsSpec d = random_affine(rng, 0.45);
    const ContractionReport rep = estimate_contraction(d, 64);
    // Contractive enough that the slowest admissible rate still equalizes by t = 100.
    if (!(rep.boundUN() < 0.8 && rep.boundAA1() < 0.8)) continue;
    ++accepted;
    const PopulationState s0(0.5 + 0.5 * unit(rng), 0.5 * unit(rng), 0.05 + 0.9 * unit(rng));
    const UtilitySpec u(-2.0 * unit(rng), 0.1 + unit(rng));
    CtOptions o;
    o.sampleEvery = 0.1;
    o.verifyStepHalving = false;
    const TrajectoryRecord un = ct_integrate(s0, PolicyMode::UN, u, d, 100.0, 1e-3, o);
    const TrajectoryRecord aa1 = ct_integrate(s0, PolicyMode::AA1, u, d, 100.0, 1e-3, o);
    if (!(std::abs(aa1.final_state().delta()) < kEqualized)) ++notEqualized;
    for (std::size_t i = 0; i < un.size(); ++i) {
      worstU = std::max(worstU, aa1.perStepUtility[i] - un.perStepUtility[i]);
      worstOrder = std::min({worstOrder, un.delta[i], aa1.delta[i]});
    }
  }
  std::ostringstream os;
  os << "instances=" << accepted << " notEqualized=" << notEqualized << " " << kv("max(U_AA1-U_UN)", worstU) << " "
     << kv("minDelta", worstOrder);
  return {accepted == 100 && notEqualized == 0 && worstU <= kUtilityOrder && worstOrder >= -kOrderSlack, os.str()};
}

Outcome aa2_brackets() {
  int instances = 0, applicable = 0, checked = 0, violations = 0;
  double worst = INFINITY;
  const double tEnd = 40.0;
  for (double k0 : {0.05, 0.15, 0.3}) {            // f0 slope in b0
    for (double gap : {0.1, 0.3, 0.5}) {           // f1 - f0 level
      for (double gA : {0.2, 0.5, 0.8}) {
        for (double u0 : {-0.1, -0.5, -1.0}) {
          ++instances;
          const AffineResponse f0{0.1, k0, 0.1};
          const AffineResponse f1{0.1 + gap, 0.0, 0.1};
          const DynamicsSpec d = affine_dynamics(f0, f1);
          const UtilitySpec u(u0, 1.0);
          const ContractionReport rep = estimate_contraction(d, 64);
          const Theorem2Verdict v = theorem2_verdict(rep.boundUN(), rep.boundAA2(), gA, u);
          if (!v.applies) continue;
          ++applicable;
          const PopulationState s0(0.8, 0.3, gA);
          CtOptions o;
          o.sampleEvery = 0.5;
          const TrajectoryRecord un = ct_integrate(s0, PolicyMode::UN, u, d, tEnd, 1e-3, o);
          const TrajectoryRecord aa2 = ct_integrate(s0, PolicyMode::AA2, u, d, tEnd, 1e-3, o);
          if (!(std::abs(un.final_state().delta()) < kEqualized && std::abs(aa2.final_state().delta()) < kEqualized))
            continue;
          ++checked;
          const UtilityBracket bu = cumulative_utility_with_tail(un, rep.boundUN(), u, gA);
          const UtilityBracket ba = cumulative_utility_with_tail(aa2, rep.boundAA2(), u, gA);
          worst = std::min(worst, ba.lower - (bu.upper - kBracketSlack));
          violations += ba.lower < bu.upper - kBracketSlack;
        }
      }
    }
  }
  // lAA2 >= lUN + stability term and the upper threshold is <= lUN, so the verdict
  // can only apply with u0 = 0 and flat responses. Those instances are the ones checked.
  for (double c0 : {0.05, 0.2, 0.4}) {
    for (double c1 : {0.6, 0.8, 0.95}) {
      for (double gA : {0.2, 0.5, 0.8}) {
        ++instances;
        const DynamicsSpec d = constant_dynamics(c0, c1);
        const UtilitySpec u(0.0, 1.0);
        const ContractionReport rep = estimate_contraction(d, 64);
        const Theorem2Verdict v = theorem2_verdict(rep.boundUN(), rep.boundAA2(), gA, u);
        if (!v.applies) continue;
        ++applicable;
        const PopulationState s0(0.8, 0.3, gA);
        CtOptions o;
        o.sampleEvery = 0.5;
        const TrajectoryRecord un = ct_integrate(s0, PolicyMode::UN, u, d, tEnd, 1e-3, o);
        const TrajectoryRecord aa2 = ct_integrate(s0, PolicyMode::AA2, u, d, tEnd, 1e-3, o);
        if (!(std::abs(un.final_state().delta()) < kEqualized && std::abs(aa2.final_state().delta()) < kEqualized))
          continue;
        ++checked;
        const UtilityBracket bu = cumulative_utility_with_tail(un, rep.boundUN(), u, gA);
        const UtilityBracket ba = cumulative_utility_with_tail(aa2, rep.boundAA2(), u, gA);
        worst = std::min(worst, ba.lower - (bu.upper - kBracketSlack));
        violations += ba.lower < bu.upper - kBracketSlack;
      }
    }
  }
  std::ostringstream os;
  os << "family=" << instances << " verdictApplies=" << applicable << " bothEqualize=" << checked
     << " violations=" << violations;
  if (checked > 0) os << " " << kv("minMargin", worst);
  return {checked > 0 && violations == 0, os.str()};
}

Outcome three_equilibria() {
  const DynamicsSpec c = appendix_c_dynamics();
  const EquilibriumAtlas atlas = find_equilibria(c, TimeMode::CT);
  if (atlas.k() != 3 || !atlas.kValid) return {false, "attracting equilibria found: " + std::to_string(atlas.k())};
  const double reps[3] = {0.1, 0.5, 0.9};
  const UtilitySpec u(-1.0, 1.0);
  int unOk = 0, aa1Ok = 0, aa2Ok = 0, aa2Equalized = 0, cross = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const PopulationState s0(reps[i], reps[j], 0.5);
      const Theorem4Comparison t = theorem4_limits(c, s0, u);
      const double eA = atlas.attracting[i].pi, eB = atlas.attracting[j].pi;
      unOk += std::abs(t.un.piA - eA) <= kLimitMatch && std::abs(t.un.piB - eB) <= kLimitMatch;
      if (i == j) continue;
      ++cross;
      const double eDis = std::min(eA, eB), eAdv = std::max(eA, eB);
      aa1Ok += std::abs(t.aa1.piA - eDis) <= kLimitMatch && std::abs(t.aa1.piB - eDis) <= kLimitMatch;
      if (t.aa2.equalized) {
        ++aa2Equalized;
        aa2Ok += std::abs(t.aa2.piA - eAdv) <= kLimitMatch && std::abs(t.aa2.piB - eAdv) <= kLimitMatch;
      }
    }
  }
  std::ostringstream os;
  os << "k=3 UNjoint=" << unOk << "/9 AA1=" << aa1Ok << "/" << cross << " AA2=" << aa2Ok << "/" << aa2Equalized
     << " (equalized)";
  return {unOk == 9 && aa1Ok == cross && aa2Ok == aa2Equalized, os.str()};
}

Outcome stereotypes() {
  const DynamicsSpec d = affine_dynamics({0.1, 0.1, 0.2}, {0.6, 0.1, 0.1});
  const ContractionReport rep = estimate_contraction(d, 64);
  const UtilitySpec u(-1.0, 1.0);
  const StereotypeSchedule neg(StereotypeSpec{0.0, -0.05});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worstGap = 0.0, worstDelta = 0.0;
  bool identical = true;
  for (int k = 0; k < 20; ++k) {
    const double piB = 0.1 + 0.4 * unit(rng);
    const PopulationState s0(piB + 0.5 * unit(rng), piB, 0.1 + 0.8 * unit(rng));
    const TrajectoryRecord dt = stereotype_dt_trajectory(s0, PolicyMode::AA1, u, d, neg, 200);
    const TrajectoryRecord ct = stereotype_ct_trajectory(s0, PolicyMode::AA1, u, d, neg, 60.0);
    for (double g : dt.qualifiedRateGap) worstGap = std::max(worstGap, g);
    for (double g : ct.qualifiedRateGap) worstGap = std::max(worstGap, g);
    worstDelta = std::max({worstDelta, std::abs(dt.final_state().delta()), std::abs(ct.final_state().delta())});

    for (PolicyMode m : {PolicyMode::UN, PolicyMode::AA, PolicyMode::AA1, PolicyMode::AA2}) {
      const TrajectoryRecord a = stereotype_dt_trajectory(s0, m, u, d, StereotypeSchedule{}, 50);
      const TrajectoryRecord b = dt_trajectory(s0, m, u, d, 50);
      const TrajectoryRecord c = stereotype_ct_trajectory(s0, m, u, d, StereotypeSchedule{}, 5.0);
      const TrajectoryRecord e = ct_integrate(s0, m, u, d, 5.0);
      identical = identical && a.states == b.states && a.policies == b.policies &&
                  a.runningUtility == b.runningUtility && c.states == e.states && c.policies == e.policies &&
                  c.runningUtility == e.runningUtility;
    }
  }
  std::ostringstream os;
  os << kv("lAA1", rep.boundAA1()) << " " << kv("maxRateGap", worstGap) << " " << kv("max|D_end|", worstDelta)
     << " zeroErrorIdentical=" << (identical ? "yes" : "no");
  return {rep.isContractiveAA1 && worstGap <= kRateGap && worstDelta < kEqualized && identical, os.str()};
}

Outcome parser() {
  const DynamicsSpec builtin = appendix_c_dynamics();
  const DynamicsSpec parsed =
      parse_dynamics("(b1 + b1/5)/1.2 + 0.01",
                     "0.5*(b1 + b1/5)/1.4 + exp(-0.000000001*(b0+b1))*sin(18*(b0+b1)) + 0.1");
  double worst = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double b0 = halton(i, 2), b1 = halton(i, 3);
    worst = std::max(worst, std::abs(builtin.raw_f0(b0, b1) - parsed.raw_f0(b0, b1)));
    worst = std::max(worst, std::abs(builtin.raw_f1(b0, b1) - parsed.raw_f1(b0, b1)));
  }
  return {worst <= kParserAgreement, kv("max|diff|", worst) + " points=10000"};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  report(1, "closed-form-vs-lp-oracle", 5.0, closed_form_vs_oracle);
  report(2, "dt-contraction-rate-law", 0.0, rate_law);
  report(3, "ct-integrator-exactness", 1.0, ct_exactness);
  report(4, "ct-delta-envelope", 0.0, envelope);
  report(5, "aa1-equalizes-un-dominates", 0.0, aa1_dominance);
  report(6, "aa2-utility-bracket-consistency", 0.0, aa2_brackets);
  report(7, "three-equilibrium-limits", 30.0, three_equilibria);
  report(8, "negative-stereotype-robustness", 0.0, stereotypes);
  report(9, "parser-fidelity", 0.0, parser);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s total %.3fs (budget 60s), %d failing\n", failures == 0 && total < 60.0 ? "PASS" : "FAIL", total,
              failures);
  return failures == 0 && total < 60.0 ? 0 : 1;
}
