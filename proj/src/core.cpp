#include "fairdyn/core.hpp"

#include <cmath>
#include <sstream>

namespace fairdyn {

namespace {

double snap_probability(double x, const char* what) {
  if (!std::isfinite(x) || x < -kProbTol || x > 1.0 + kProbTol) {
    std::ostringstream os;
    os.precision(17);
    os << what << " must lie in [0,1], got " << x;
    throw ValidationError(os.str());
  }
  if (x < 0.0) return 0.0;
  if (x > 1.0) return 1.0;
  return x;
}

}  // namespace

const char* to_string(Group g) { return g == Group::A ? "A" : "B"; }

QualificationProfile::QualificationProfile(double p1) : p1_(snap_probability(p1, "qualified fraction")) {}

PopulationState::PopulationState(QualificationProfile piA, QualificationProfile piB, double gA)
    : piA_(piA), piB_(piB), gA_(gA) {
  if (!(gA > 0.0 && gA < 1.0)) {
    std::ostringstream os;
    os << "group share gA must lie in (0,1), got " << gA;
    throw ValidationError(os.str());
  }
}

UtilitySpec::UtilitySpec(double u0, double u1) : u0_(u0), u1_(u1) {
  if (!std::isfinite(u0) || !std::isfinite(u1) || u0 > 0.0 || u1 < 0.0) {
    std::ostringstream os;
    os << "utilities must satisfy u0 <= 0 <= u1, got u0=" << u0 << " u1=" << u1;
    throw ValidationError(os.str());
  }
}

Policy::Policy(const std::array<std::array<double, 2>, 2>& tau) {
  for (int v = 0; v < 2; ++v)
    for (int j = 0; j < 2; ++j) tau_[v][j] = snap_probability(tau[v][j], "selection probability");
}

Policy Policy::make(double tau1A, double tau0A, double tau1B, double tau0B) {
  return Policy({{{tau0A, tau0B}, {tau1A, tau1B}}});
}

Policy Policy::swapped() const {
  Policy out;
  for (int v = 0; v < 2; ++v) {
    out.tau_[v][0] = tau_[v][1];
    out.tau_[v][1] = tau_[v][0];
  }
  return out;
}

SelectionRates selection_rates(const PopulationState& state, const Policy& policy) {
  SelectionRates r;
  for (Group g : {Group::A, Group::B}) {
    const auto& pi = state.profile(g);
    for (int v = 0; v < 2; ++v) r.betaV[v][idx(g)] = policy.tau(v, g) * pi.p(v);
    r.betaAgg[idx(g)] = r.betaV[0][idx(g)] + r.betaV[1][idx(g)];
  }
  return r;
}

double utility(const PopulationState& state, const Policy& policy, const UtilitySpec& u) {
  double total = 0.0;
  for (Group g : {Group::A, Group::B}) {
    const auto& pi = state.profile(g);
    double inner = 0.0;
    for (int v = 0; v < 2; ++v) inner += u.u(v) * policy.tau(v, g) * pi.p(v);
    total += state.share(g) * inner;
  }
  return total;
}

}  // namespace fairdyn
