#include "fairdyn/stereotype.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairdyn {

namespace {

constexpr double kEpsTol = 1e-12;

std::string describe(const PopulationState& s, const StereotypeSpec& e) {
  std::ostringstream os;
  os << "(piA=" << s.piA().p1() << ", piB=" << s.piB().p1() << ", epsA=" << e.epsA << ", epsB=" << e.epsB << ")";
  return os.str();
}

// Selected share of the qualified when only (pi + eps) / pi of them are recognised.
double recognised(double pi, double eps) { return pi > 0.0 ? std::max(0.0, (pi + eps) / pi) : 1.0; }

// Share of the unqualified mistaken for qualified.
double mistaken(double pi, double eps) { return pi < 1.0 ? std::min(1.0, eps / (1.0 - pi)) : 0.0; }

Policy assemble(Group adv, double tau1Adv, double tau0Adv, double tau1Dis, double tau0Dis) {
  if (adv == Group::A) return Policy::make(tau1Adv, tau0Adv, tau1Dis, tau0Dis);
  return Policy::make(tau1Dis, tau0Dis, tau1Adv, tau0Adv);
}

Policy un_effective(const PopulationState& s, const StereotypeSpec& e) {
  double t[2][2];
  for (Group g : {Group::A, Group::B}) {
    const double pi = s.profile(g).p1();
    const double eps = g == Group::A ? e.epsA : e.epsB;
    if (eps >= 0.0) {
      t[idx(g)][1] = 1.0;
      t[idx(g)][0] = mistaken(pi, eps);
    } else {
      t[idx(g)][1] = recognised(pi, eps);
      t[idx(g)][0] = 0.0;
    }
  }
  return Policy::make(t[0][1], t[0][0], t[1][1], t[1][0]);
}

Policy aa1_effective(Group adv, double pAdv, double pDis, double eAdv, double eDis) {
  double tau1Adv = pAdv > 0.0 ? (pDis + eDis) / pAdv : 1.0;
  if (eAdv >= 0.0 && eDis >= 0.0) tau1Adv = std::min(1.0, tau1Adv);
  if (eDis >= 0.0) return assemble(adv, tau1Adv, 0.0, 1.0, mistaken(pDis, eDis));
  return assemble(adv, tau1Adv, 0.0, recognised(pDis, eDis), 0.0);
}

Policy aa2_effective(Group adv, double pAdv, double pDis, double eAdv, double eDis) {
  const double tau0Dis = pDis < 1.0 ? std::min(1.0, (pAdv - pDis + eAdv - eDis) / (1.0 - pDis)) : 0.0;
  if (eAdv >= 0.0) return assemble(adv, 1.0, mistaken(pAdv, eAdv), 1.0, tau0Dis);
  return assemble(adv, recognised(pAdv, eAdv), 0.0, 1.0, tau0Dis);
}

}  // namespace

void validate_stereotype(const PopulationState& state, const StereotypeSpec& eps) {
  for (Group g : {Group::A, Group::B}) {
    const double pi = state.profile(g).p1();
    const double e = g == Group::A ? eps.epsA : eps.epsB;
    if (!std::isfinite(e) || e < -pi - kEpsTol || e > 1.0 - pi + kEpsTol)
      throw StereotypeError("stereotype error outside [-pi, 1 - pi] for group " + std::string(to_string(g)) + " " +
                            describe(state, eps));
    if (pi == 0.0 && e < 0.0)
      throw StereotypeError("negative stereotype on a group with no qualified individuals " + describe(state, eps));
  }
  const Group adv = advantaged_group(state);
  const double eAdv = adv == Group::A ? eps.epsA : eps.epsB;
  const double eDis = adv == Group::A ? eps.epsB : eps.epsA;
  const double gap = state.profile(adv).p1() - state.profile(other(adv)).p1();
  if (eDis - eAdv > gap + kEpsTol)
    throw StereotypeError("stereotype flips the perceived advantaged group " + describe(state, eps));
}

PolicyDecision effective_decision(PolicyMode mode, const PopulationState& state, const UtilitySpec& u,
                                  const StereotypeSpec& eps) {
  validate_stereotype(state, eps);
  if (mode == PolicyMode::UN) return {un_effective(state, eps), CaseTag::UN};

  const Group adv = advantaged_group(state);
  const double pAdv = state.profile(adv).p1();
  const double pDis = state.profile(other(adv)).p1();
  const double eAdv = adv == Group::A ? eps.epsA : eps.epsB;
  const double eDis = adv == Group::A ? eps.epsB : eps.epsA;

  CaseTag tag = mode == PolicyMode::AA1 ? CaseTag::AA1 : CaseTag::AA2;
  if (mode == PolicyMode::AA) {
    const AACase c = determine_aa_case(state, u);
    tag = c.tag == AATag::AA1 ? CaseTag::AA1 : c.tag == AATag::AA2 ? CaseTag::AA2 : CaseTag::Boundary;
  }
  if (tag == CaseTag::AA1) return {aa1_effective(adv, pAdv, pDis, eAdv, eDis), tag};
  return {aa2_effective(adv, pAdv, pDis, eAdv, eDis), tag};
}

Policy effective_policy(PolicyMode mode, const PopulationState& state, const UtilitySpec& u,
                        const StereotypeSpec& eps) {
  return effective_decision(mode, state, u, eps).policy;
}

StereotypeSchedule::StereotypeSchedule(std::vector<StereotypeSpec> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("stereotype schedule needs at least one entry");
  for (const auto& e : entries_)
    if (!std::isfinite(e.epsA) || !std::isfinite(e.epsB))
      throw ValidationError("stereotype schedule entries must be finite");
}

const StereotypeSpec& StereotypeSchedule::at(double t) const {
  const double k = std::floor(t + 1e-9);
  if (!(k > 0.0)) return entries_.front();
  const auto i = static_cast<std::size_t>(std::min(k, static_cast<double>(entries_.size() - 1)));
  return entries_[i];
}

PolicyProvider make_stereotype_provider(PolicyMode mode, const UtilitySpec& u, const StereotypeSchedule& schedule) {
  return [mode, u, schedule](const PopulationState& state, double t) {
    return effective_decision(mode, state, u, schedule.at(t));
  };
}

TrajectoryRecord stereotype_dt_trajectory(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                                          const DynamicsSpec& dyn, const StereotypeSchedule& schedule, long steps,
                                          const DtOptions& opts) {
  return dt_trajectory_with(make_stereotype_provider(mode, u, schedule), mode, state0, u, dyn, steps, opts);
}

TrajectoryRecord stereotype_ct_trajectory(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                                          const DynamicsSpec& dyn, const StereotypeSchedule& schedule, double tEnd,
                                          double h, const CtOptions& opts) {
  return ct_integrate_with(make_stereotype_provider(mode, u, schedule), mode, state0, u, dyn, tEnd, h, opts);
}

}  // namespace fairdyn
