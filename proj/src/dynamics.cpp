#include "fairdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairdyn {

DynamicsSpec::DynamicsSpec(std::string name, ResponseFn f0, ResponseFn f1, std::optional<double> declaredL0,
                           std::optional<double> declaredL1)
    : name_(std::move(name)), f0_(std::move(f0)), f1_(std::move(f1)), l0_(declaredL0), l1_(declaredL1) {
  if (!f0_ || !f1_) throw ValidationError("dynamics '" + name_ + "': f0 and f1 must be provided");
  for (const auto& l : {l0_, l1_})
    if (l && !(*l >= 0.0 && std::isfinite(*l)))
      throw ValidationError("dynamics '" + name_ + "': Lipschitz constants must be nonnegative");
}

Response DynamicsSpec::respond(double b0, double b1) const {
  const double r0 = f0_(b0, b1);
  const double r1 = f1_(b0, b1);
  if (!std::isfinite(r0) || !std::isfinite(r1)) {
    std::ostringstream os;
    os << "dynamics '" << name_ << "' is not finite at (" << b0 << ", " << b1 << ")";
    throw std::domain_error(os.str());
  }
  Response r{std::clamp(r0, 0.0, 1.0), std::clamp(r1, 0.0, 1.0), 0};
  r.clamps = (r.f0 != r0) + (r.f1 != r1);
  return r;
}

double DynamicsSpec::un_map(double pi) const {
  const Response r = respond(0.0, pi);
  return pi * r.f1 + (1.0 - pi) * r.f0;
}

LipschitzCheck check_declared_lipschitz(const DynamicsSpec& dyn, int resolution) {
  LipschitzCheck out;
  const double step = 1.0 / resolution;
  // Neighbour offsets: right, up, diagonal, anti-diagonal.
  constexpr int offsets[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int i = 0; i <= resolution; ++i) {
    for (int j = 0; j <= resolution; ++j) {
      const Response here = dyn.respond(i * step, j * step);
      for (const auto& o : offsets) {
        const int ni = i + o[0], nj = j + o[1];
        if (ni > resolution || nj < 0 || nj > resolution) continue;
        const Response there = dyn.respond(ni * step, nj * step);
        const double dist = (std::abs(o[0]) + std::abs(o[1])) * step;
        out.maxRatioF0 = std::max(out.maxRatioF0, std::abs(there.f0 - here.f0) / dist);
        out.maxRatioF1 = std::max(out.maxRatioF1, std::abs(there.f1 - here.f1) / dist);
      }
    }
  }
  if (dyn.declaredL0() && out.maxRatioF0 > *dyn.declaredL0() + 1e-6) out.ok = false;
  if (dyn.declaredL1() && out.maxRatioF1 > *dyn.declaredL1() + 1e-6) out.ok = false;
  return out;
}

const char* to_string(PolicyMode m) {
  switch (m) {
    case PolicyMode::UN: return "UN";
    case PolicyMode::AA: return "AA";
    case PolicyMode::AA1: return "AA1";
    case PolicyMode::AA2: return "AA2";
  }
  return "?";
}

const char* to_string(TimeMode m) { return m == TimeMode::DT ? "DT" : "CT"; }

const char* to_string(CaseTag c) {
  switch (c) {
    case CaseTag::UN: return "UN";
    case CaseTag::AA1: return "AA1";
    case CaseTag::AA2: return "AA2";
    case CaseTag::Boundary: return "BOUNDARY";
  }
  return "?";
}

PolicyMode parse_policy_mode(const std::string& s) {
  if (s == "UN") return PolicyMode::UN;
  if (s == "AA") return PolicyMode::AA;
  if (s == "AA1") return PolicyMode::AA1;
  if (s == "AA2") return PolicyMode::AA2;
  throw ValidationError("unknown policy mode '" + s + "' (expected UN, AA, AA1 or AA2)");
}

TimeMode parse_time_mode(const std::string& s) {
  if (s == "DT") return TimeMode::DT;
  if (s == "CT") return TimeMode::CT;
  throw ValidationError("unknown time mode '" + s + "' (expected DT or CT)");
}

PolicyDecision decide_policy(PolicyMode mode, const PopulationState& state, const UtilitySpec& u) {
  switch (mode) {
    case PolicyMode::UN: return {unconstrained_policy(state, u).policy, CaseTag::UN};
    case PolicyMode::AA: {
      const PolicySolution s = aa_policy(state, u);
      const CaseTag tag = s.aaCase->tag == AATag::AA1   ? CaseTag::AA1
                          : s.aaCase->tag == AATag::AA2 ? CaseTag::AA2
                                                        : CaseTag::Boundary;
      return {s.policy, tag};
    }
    case PolicyMode::AA1: return {aa1_policy(state, advantaged_group(state)), CaseTag::AA1};
    case PolicyMode::AA2: return {aa2_policy(state, advantaged_group(state)), CaseTag::AA2};
  }
  throw std::logic_error("unhandled policy mode");
}

PolicyProvider make_policy_provider(PolicyMode mode, const UtilitySpec& u) {
  return [mode, u](const PopulationState& state, double) { return decide_policy(mode, state, u); };
}

GroupRates rates_for(const SelectionRates& rates, Group g) {
  return {rates.per_evaluation(0, g), rates.per_evaluation(1, g)};
}

StepOutcome dt_step(const QualificationProfile& profile, const GroupRates& rates, const DynamicsSpec& dyn) {
  const Response r = dyn.respond(rates.beta0, rates.beta1);
  const double p = profile.p1();
  const double raw = p * r.f1 + (1.0 - p) * r.f0;
  const double next = std::clamp(raw, 0.0, 1.0);
  return {QualificationProfile(next), r.clamps + (next != raw)};
}

CtDerivative ct_derivative(const PopulationState& state, const Policy& policy, const DynamicsSpec& dyn) {
  const SelectionRates rates = selection_rates(state, policy);
  CtDerivative d;
  for (Group g : {Group::A, Group::B}) {
    const GroupRates gr = rates_for(rates, g);
    const Response r = dyn.respond(gr.beta0, gr.beta1);
    const double p = state.profile(g).p1();
    const double v = p * (r.f1 - 1.0) + (1.0 - p) * r.f0;
    (g == Group::A ? d.dA : d.dB) = v;
    d.clamps += r.clamps;
  }
  return d;
}

std::string event_flags_to_string(std::uint32_t flags) {
  static constexpr std::pair<EventFlag, const char*> names[] = {
      {kEventCaseSwitch, "switch"}, {kEventClamp, "clamp"},         {kEventCrossing, "cross"},
      {kEventMerge, "merge"},       {kEventStepHalving, "halving"},
  };
  std::string out;
  for (const auto& [bit, name] : names) {
    if (!(flags & bit)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out.empty() ? "-" : out;
}

namespace {

bool is_aa_tag(CaseTag t) { return t != CaseTag::UN; }
bool resolved_aa1(CaseTag t) { return t == CaseTag::AA1; }

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

void add_event(TrajectoryRecord& rec, std::uint32_t& pending, double t, EventFlag kind) {
  pending |= kind;
  rec.events.push_back({t, kind});
}

void note_case_switch(TrajectoryRecord& rec, std::uint32_t& pending, double t, CaseTag prev, CaseTag cur,
                      bool strict) {
  if (!is_aa_tag(prev) || !is_aa_tag(cur) || resolved_aa1(prev) == resolved_aa1(cur)) return;
  ++rec.caseSwitches;
  add_event(rec, pending, t, kEventCaseSwitch);
  std::ostringstream os;
  os.precision(17);
  os << "AA case switched " << to_string(prev) << " -> " << to_string(cur) << " at t=" << t;
  rec.warnings.push_back(os.str());
  if (strict) throw CaseSwitchError(os.str());
}

void push_row(TrajectoryRecord& rec, double t, const PopulationState& s, const PolicyDecision& dec, double stepU,
              double running, std::uint32_t flags) {
  const SelectionRates rates = selection_rates(s, dec.policy);
  rec.times.push_back(t);
  rec.states.push_back(s);
  rec.policies.push_back(dec.policy);
  rec.cases.push_back(dec.tag);
  rec.perStepUtility.push_back(stepU);
  rec.runningUtility.push_back(running);
  rec.delta.push_back(s.delta());
  rec.qualifiedRateGap.push_back(std::abs(rates.per_evaluation(1, Group::A) - rates.per_evaluation(1, Group::B)));
  rec.flags.push_back(flags);
}

}  // namespace

TrajectoryRecord dt_trajectory(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                               const DynamicsSpec& dyn, long steps, const DtOptions& opts) {
  return dt_trajectory_with(make_policy_provider(mode, u), mode, state0, u, dyn, steps, opts);
}

TrajectoryRecord dt_trajectory_with(const PolicyProvider& provider, PolicyMode modeTag,
                                    const PopulationState& state0, const UtilitySpec& u, const DynamicsSpec& dyn,
                                    long steps, const DtOptions& opts) {
  if (steps < 0) throw ValidationError("steps must be nonnegative");
  TrajectoryRecord rec;
  rec.timeMode = TimeMode::DT;
  rec.mode = modeTag;
  const std::size_t rows = static_cast<std::size_t>(steps) + 1;
  rec.times.reserve(rows);
  rec.states.reserve(rows);

  PopulationState state = state0;
  std::uint32_t pending = 0;
  CaseTag prevTag = CaseTag::UN;
  double running = 0.0;
  for (long t = 0;; ++t) {
    const PolicyDecision dec = provider(state, static_cast<double>(t));
    if (t > 0) note_case_switch(rec, pending, static_cast<double>(t), prevTag, dec.tag, opts.strict);
    prevTag = dec.tag;
    const double stepU = utility(state, dec.policy, u);
    running += stepU;
    push_row(rec, static_cast<double>(t), state, dec, stepU, running, pending);
    pending = 0;
    if (t == steps) break;

    const SelectionRates rates = selection_rates(state, dec.policy);
    const StepOutcome a = dt_step(state.piA(), rates_for(rates, Group::A), dyn);
    const StepOutcome b = dt_step(state.piB(), rates_for(rates, Group::B), dyn);
    const PopulationState next(a.next, b.next, state.gA());
    const double tn = static_cast<double>(t + 1);
    if (a.clamps + b.clamps > 0) {
      rec.clampCount += a.clamps + b.clamps;
      add_event(rec, pending, tn, kEventClamp);
    }
    if (sign_of(state.delta()) * sign_of(next.delta()) < 0) add_event(rec, pending, tn, kEventCrossing);
    state = next;
  }
  rec.cumulativeUtility = running;
  rec.endTime = static_cast<double>(steps);
  rec.endState = state;
  return rec;
}

namespace {

// Fixed-step classical RK4 for the two coupled group equations. Groups whose
// profiles come within kMergeTol under a group-symmetric policy are merged.
class CtStepper {
 public:
  CtStepper(const PolicyProvider& provider, const DynamicsSpec& dyn, double gA)
      : provider_(provider), dyn_(dyn), gA_(gA) {}

  PopulationState state_at(double a, double b) const {
    return PopulationState(std::clamp(a, 0.0, 1.0), std::clamp(b, 0.0, 1.0), gA_);
  }

  // Returns true when this step merged the groups.
  bool step(double& a, double& b, double t, double h) {
    double ka[4], kb[4];
    double sa = a, sb = b;
    const double cs[4] = {0.0, 0.5, 0.5, 1.0};
    for (int s = 0; s < 4; ++s) {
      if (s > 0) {
        sa = a + cs[s] * h * ka[s - 1];
        sb = b + cs[s] * h * kb[s - 1];
      }
      const PopulationState st = state_at(sa, sb);
      const PolicyDecision dec = provider_(st, t + cs[s] * h);
      const CtDerivative d = ct_derivative(st, dec.policy, dyn_);
      clamps_ += d.clamps;
      ka[s] = d.dA;
      kb[s] = d.dB;
    }
    a = std::clamp(a + h / 6.0 * (ka[0] + 2.0 * ka[1] + 2.0 * ka[2] + ka[3]), 0.0, 1.0);
    b = std::clamp(b + h / 6.0 * (kb[0] + 2.0 * kb[1] + 2.0 * kb[2] + kb[3]), 0.0, 1.0);

    if (a != b && std::abs(a - b) < kMergeTol) {
      const double m = 0.5 * (a + b);
      const Policy p = provider_(state_at(m, m), t + h).policy;
      const bool symmetric = p.tau(0, Group::A) == p.tau(0, Group::B) && p.tau(1, Group::A) == p.tau(1, Group::B);
      if (symmetric) {
        a = b = m;
        return true;
      }
    }
    return false;
  }

  long take_clamps() {
    const long c = clamps_;
    clamps_ = 0;
    return c;
  }

 private:
  const PolicyProvider& provider_;
  const DynamicsSpec& dyn_;
  double gA_;
  long clamps_ = 0;
};

long step_count(double tEnd, double h) {
  if (tEnd <= 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(tEnd / h - 1e-9)));
}

}  // namespace

PopulationState ct_endpoint(const PolicyProvider& provider, const PopulationState& state0, const DynamicsSpec& dyn,
                            double tEnd, long n) {
  CtStepper stepper(provider, dyn, state0.gA());
  double a = state0.piA().p1(), b = state0.piB().p1();
  const double h = n > 0 ? tEnd / n : 0.0;
  for (long i = 0; i < n; ++i) stepper.step(a, b, i * h, h);
  return stepper.state_at(a, b);
}

TrajectoryRecord ct_integrate(const PopulationState& state0, PolicyMode mode, const UtilitySpec& u,
                              const DynamicsSpec& dyn, double tEnd, double h, const CtOptions& opts) {
  return ct_integrate_with(make_policy_provider(mode, u), mode, state0, u, dyn, tEnd, h, opts);
}

TrajectoryRecord ct_integrate_with(const PolicyProvider& provider, PolicyMode modeTag,
                                   const PopulationState& state0, const UtilitySpec& u, const DynamicsSpec& dyn,
                                   double tEnd, double h, const CtOptions& opts) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("step size h must be positive");
  if (!(tEnd >= 0.0) || !std::isfinite(tEnd)) throw ValidationError("tEnd must be nonnegative");

  TrajectoryRecord rec;
  rec.timeMode = TimeMode::CT;
  rec.mode = modeTag;

  const long n = step_count(tEnd, h);
  const double hEff = n > 0 ? tEnd / n : h;
  const long stride = opts.sampleEvery > 0.0 ? std::max(1L, std::lround(opts.sampleEvery / hEff)) : 1L;
  rec.times.reserve(static_cast<std::size_t>(n / stride + 1));

  CtStepper stepper(provider, dyn, state0.gA());
  double a = state0.piA().p1(), b = state0.piB().p1();
  std::uint32_t pending = 0;
  CaseTag prevTag = CaseTag::UN;
  double integral = 0.0, prevU = 0.0;
  bool merged = a == b;

  for (long i = 0;; ++i) {
    const double t = i * hEff;
    const PopulationState st = stepper.state_at(a, b);
    const PolicyDecision dec = provider(st, t);
    if (i > 0) note_case_switch(rec, pending, t, prevTag, dec.tag, opts.strict);
    prevTag = dec.tag;
    const double U = utility(st, dec.policy, u);
    if (i > 0) integral += 0.5 * hEff * (prevU + U);
    prevU = U;
    if (i % stride == 0) {
      push_row(rec, t, st, dec, U, integral, pending);
      pending = 0;
    }
    if (i == n) {
      rec.endState = st;
      break;
    }

    const double prevDelta = a - b;
    const bool mergedNow = stepper.step(a, b, t, hEff);
    const double tn = (i + 1) * hEff;
    if (const long c = stepper.take_clamps(); c > 0) {
      rec.clampCount += c;
      add_event(rec, pending, tn, kEventClamp);
    }
    if (mergedNow && !merged) add_event(rec, pending, tn, kEventMerge);
    merged = a == b;
    if (sign_of(prevDelta) * sign_of(a - b) < 0) add_event(rec, pending, tn, kEventCrossing);
  }
  rec.cumulativeUtility = integral;
  rec.endTime = tEnd;

  if (opts.verifyStepHalving && n > 0) {
    const PopulationState fine = ct_endpoint(provider, state0, dyn, tEnd, 2 * n);
    rec.stepHalvingError = std::max(std::abs(fine.piA().p1() - rec.endState->piA().p1()),
                                    std::abs(fine.piB().p1() - rec.endState->piB().p1()));
    if (rec.stepHalvingError > kStepHalvingTol) {
      rec.stepHalvingOk = false;
      rec.events.push_back({tEnd, kEventStepHalving});
      rec.flags.back() |= kEventStepHalving;
      std::ostringstream os;
      os << "step-halving check failed: endpoint difference " << rec.stepHalvingError << " > "
         << kStepHalvingTol;
      rec.warnings.push_back(os.str());
      if (opts.strict) throw ConvergenceError(os.str());
    }
  }
  return rec;
}

UtilityBracket cumulative_utility_with_tail(const TrajectoryRecord& record, double L, const UtilitySpec& u,
                                            double gA) {
  if (!(L >= 0.0 && L < 1.0)) throw ValidationError("tail bound requires a contraction constant 0 <= L < 1");
  if (!record.endState) throw ValidationError("empty trajectory record");

  const double deltaEnd = record.endState->delta();
  const double gDis = deltaEnd >= 0.0 ? 1.0 - gA : gA;

  CaseTag form = CaseTag::UN;
  switch (record.mode) {
    case PolicyMode::UN: form = CaseTag::UN; break;
    case PolicyMode::AA1: form = CaseTag::AA1; break;
    case PolicyMode::AA2: form = CaseTag::AA2; break;
    case PolicyMode::AA: form = record.cases.empty() ? CaseTag::AA2 : record.cases.back(); break;
  }
  double k = 0.0;
  switch (form) {
    case CaseTag::UN: k = gDis * u.u1(); break;
    case CaseTag::AA1: k = u.u1(); break;
    case CaseTag::AA2:
    case CaseTag::Boundary: k = gDis * (u.u1() + std::abs(u.u0())); break;
  }

  UtilityBracket br;
  br.finiteIntegral = record.cumulativeUtility;
  br.deltaCoefficient = k;
  const double d = std::abs(deltaEnd);
  br.deltaTailLower = d / (1.0 + L);
  br.deltaTailUpper = d / (1.0 - L);
  br.lower = br.finiteIntegral - k * br.deltaTailUpper;
  br.upper = br.finiteIntegral - k * br.deltaTailLower;
  return br;
}

}  // namespace fairdyn
