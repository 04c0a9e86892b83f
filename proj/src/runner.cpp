#include "fairdyn/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "fairdyn/builtins.hpp"
#include "fairdyn/expression.hpp"
#include "fairdyn/policy.hpp"

namespace fairdyn {

using json = nlohmann::ordered_json;
using kernels::Exec;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const StereotypeError*>(&e)) return kExitStereotype;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitInvalidScenario;
  if (dynamic_cast<const CaseSwitchError*>(&e) || dynamic_cast<const ConvergenceError*>(&e))
    return kExitStrictWarning;
  return kExitError;
}

namespace {

PolicyProvider provider_for(const Scenario& s, PolicyMode mode) {
  if (s.stereotype) return make_stereotype_provider(mode, s.utility(), *s.stereotype);
  return make_policy_provider(mode, s.utility());
}

TrajectoryRecord run_mode(const Scenario& s, const DynamicsSpec& dyn, PolicyMode mode, bool strict) {
  const PolicyProvider provider = provider_for(s, mode);
  if (s.timeMode == TimeMode::DT)
    return dt_trajectory_with(provider, mode, s.initial_state(), s.utility(), dyn, s.steps, DtOptions{strict});
  CtOptions opts;
  opts.sampleEvery = s.sampleEvery;
  opts.strict = strict;
  return ct_integrate_with(provider, mode, s.initial_state(), s.utility(), dyn, s.tEnd, s.h, opts);
}

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const EquilibriumPoint& p) {
  return json{{"pi", p.pi}, {"residual", p.residual}, {"slope", p.slope}, {"localRate", p.localRate},
              {"radius", p.radius}};
}

json to_json(const EquilibriumAtlas& a) {
  json out{{"timeMode", to_string(a.mode)}, {"k", a.k()}, {"kValid", a.kValid},
           {"degenerateContinuum", a.degenerateContinuum}};
  out["attracting"] = json::array();
  for (const auto& p : a.attracting) out["attracting"].push_back(to_json(p));
  out["unstable"] = json::array();
  for (const auto& p : a.unstable) out["unstable"].push_back(to_json(p));
  out["notes"] = a.notes;
  return out;
}

json to_json(const ModeLimit& m) {
  return json{{"mode", to_string(m.mode)},   {"piA", m.piA},
              {"piB", m.piB},                {"converged", m.converged},
              {"time", m.time},              {"utilityAtLimit", m.utilityAtLimit},
              {"equalized", m.equalized}};
}

}  // namespace

TrajectoryRecord simulate(const Scenario& s, bool strict) {
  return run_mode(s, s.dynamics.build(), s.mode, strict);
}

FieldGrid export_field(const DynamicsSpec& dyn, PolicyMode mode, const UtilitySpec& u, double gA, int resolution,
                       Exec exec) {
  if (resolution < 2) throw ValidationError("field resolution must be >= 2");
  FieldGrid grid;
  grid.resolution = resolution;
  grid.mode = mode;
  const long n = resolution;
  grid.points.resize(static_cast<std::size_t>(n * n));
  const auto coord = [n](long i) { return static_cast<double>(i) / static_cast<double>(n - 1); };
  kernels::for_each_index(exec, n * n, [&](long k) {
    FieldPoint& p = grid.points[static_cast<std::size_t>(k)];
    p.piB = coord(k / n);
    p.piA = coord(k % n);
    const PopulationState st(p.piA, p.piB, gA);
    const CtDerivative d = ct_derivative(st, decide_policy(mode, st, u).policy, dyn);
    p.dA = d.dA;
    p.dB = d.dB;
    if (mode != PolicyMode::UN) {
      const CtDerivative un = ct_derivative(st, decide_policy(PolicyMode::UN, st, u).policy, dyn);
      p.diffA = d.dA - un.dA;
      p.diffB = d.dB - un.dB;
    }
  });
  return grid;
}

json analyze(const Scenario& s, int resolution, Exec exec) {
  const DynamicsSpec dyn = s.dynamics.build();
  const UtilitySpec u = s.utility();
  const PopulationState st = s.initial_state();
  json out;
  out["scenario"] = s.name;
  out["dynamics"] = dyn.name();

  const ContractionReport c = estimate_contraction(dyn, resolution, exec);
  out["contraction"] = json{{"method", to_string(c.method)},
                            {"gridResolution", c.gridResolution},
                            {"L0", c.L0},
                            {"L1", c.L1},
                            {"lUN", c.lUN},
                            {"lAA1", c.lAA1},
                            {"lAA2", c.lAA2},
                            {"lUNUpper", opt_number(c.lUNUpper)},
                            {"lAA1Upper", opt_number(c.lAA1Upper)},
                            {"lAA2Upper", opt_number(c.lAA2Upper)},
                            {"contractiveUN", c.isContractiveUN},
                            {"contractiveAA1", c.isContractiveAA1},
                            {"contractiveAA2", c.isContractiveAA2}};
  if (dyn.has_declared_constants()) {
    const LipschitzCheck lc = check_declared_lipschitz(dyn, resolution);
    out["lipschitzCheck"] = json{{"ok", lc.ok}, {"maxRatioF0", lc.maxRatioF0}, {"maxRatioF1", lc.maxRatioF1}};
  }

  const StatusQuoCheck sq = check_status_quo_bias(dyn, resolution, exec);
  out["statusQuoBias"] = json{{"holds", sq.holds}};
  if (sq.counterexample)
    out["statusQuoBias"]["counterexample"] = json{{"b0", sq.counterexample->first}, {"b1", sq.counterexample->second}};

  const EquilibriumAtlas atlas = find_equilibria(dyn, s.timeMode, kDefaultScanCells, exec);
  out["equilibria"] = to_json(atlas);

  if ((1.0 - s.gA) * u.u1() + std::abs(u.u0()) > 0.0) {
    const Theorem2Verdict v = theorem2_verdict(c.boundUN(), c.boundAA2(), s.gA, u);
    out["aa2Verdict"] = json{{"alpha", v.alpha},       {"lowerThreshold", v.lowerThreshold},
                           {"upperThreshold", v.upperThreshold}, {"lowerOK", v.lowerOK},
                           {"upperOK", v.upperOK},   {"applies", v.applies}};
  } else {
    out["aa2Verdict"] = nullptr;
  }

  const Prop3Persistence p3 = prop3_case_persistence(s.gA, u);
  out["casePersistence"] = json{{"aa1UnderA", p3.aa1UnderA}, {"aa1UnderB", p3.aa1UnderB},
                                {"aa2UnderA", p3.aa2UnderA}, {"aa2UnderB", p3.aa2UnderB},
                                {"alwaysAA1", p3.alwaysAA1}, {"alwaysAA2", p3.alwaysAA2}};

  // Convergence envelope for the scenario's own mode, when that mode is contractive.
  double L = -1.0;
  switch (s.mode) {
    case PolicyMode::UN: L = c.boundUN(); break;
    case PolicyMode::AA1: L = c.boundAA1(); break;
    case PolicyMode::AA2: L = c.boundAA2(); break;
    case PolicyMode::AA: L = determine_aa_case(st, u).resolved() == AATag::AA1 ? c.boundAA1() : c.boundAA2(); break;
  }
  const double horizon = s.timeMode == TimeMode::DT ? static_cast<double>(s.steps) : s.tEnd;
  if (L >= 0.0 && L < 1.0) {
    const DeltaBounds b = delta_bounds(L, std::abs(st.delta()), horizon, s.timeMode);
    out["deltaBounds"] = json{{"L", L}, {"delta0", std::abs(st.delta())}, {"t", horizon}, {"lower", b.lower},
                              {"upper", b.upper}};
  } else {
    out["deltaBounds"] = nullptr;
  }

  if (atlas.kValid && s.timeMode == TimeMode::CT) {
    const Theorem4Comparison t4 = theorem4_limits(dyn, st, u);
    json j{{"advantaged", to_string(t4.advantaged)},
           {"basinA", t4.basinA},
           {"basinB", t4.basinB},
           {"UN", to_json(t4.un)},
           {"AA1", to_json(t4.aa1)},
           {"AA2", to_json(t4.aa2)},
           {"unMatches", t4.unMatches},
           {"aa1Matches", t4.aa1Matches},
           {"aa2Matches", t4.aa2Matches ? json(*t4.aa2Matches) : json(nullptr)},
           {"allConverged", t4.allConverged},
           {"utilityOrderingHolds", t4.utilityOrderingHolds},
           {"notes", t4.notes}};
    out["limits"] = j;
  }
  return out;
}

Comparison compare_policies(const Scenario& s, bool strict) {
  const DynamicsSpec dyn = s.dynamics.build();
  Comparison c;
  for (PolicyMode m : {PolicyMode::UN, PolicyMode::AA1, PolicyMode::AA2}) {
    const TrajectoryRecord r = run_mode(s, dyn, m, strict);
    c.entries.push_back({m, r.cumulativeUtility, r.final_state().piA().p1(), r.final_state().piB().p1(),
                         r.caseSwitches});
  }
  c.unAtLeastAA1 = c.entries[0].cumulativeUtility >= c.entries[1].cumulativeUtility - 1e-9;
  return c;
}

json to_json(const Comparison& c) {
  json out;
  out["policies"] = json::array();
  for (const auto& e : c.entries)
    out["policies"].push_back(json{{"mode", to_string(e.mode)},
                                   {"cumulativeUtility", e.cumulativeUtility},
                                   {"finalPiA", e.finalPiA},
                                   {"finalPiB", e.finalPiB}});
  out["unAtLeastAA1"] = c.unAtLeastAA1;
  return out;
}

ArtifactSet run_scenario(const Scenario& s, const RunOptions& opts) {
  namespace fs = std::filesystem;
  fs::create_directories(opts.outDir);
  const auto path = [&](const std::string& suffix) { return (fs::path(opts.outDir) / (s.name + suffix)).string(); };
  ArtifactSet out;
  if (s.outputs.trajectory) {
    const TrajectoryRecord rec = simulate(s, opts.strict);
    std::ostringstream csv;
    write_trajectory_csv(csv, rec);
    write_text_file(path(".trajectory.csv"), csv.str());
    out.files.push_back(path(".trajectory.csv"));
    out.warnings.insert(out.warnings.end(), rec.warnings.begin(), rec.warnings.end());
  }
  if (s.outputs.report) {
    const json rep = analyze(s, opts.resolution > 0 ? opts.resolution : 256, opts.exec);
    write_text_file(path(".report.json"), rep.dump(2) + "\n");
    out.files.push_back(path(".report.json"));
  }
  if (s.outputs.field) {
    const int res = opts.resolution > 0 ? opts.resolution : s.outputs.resolution;
    const FieldGrid g = export_field(s.dynamics.build(), s.mode, s.utility(), s.gA, res, opts.exec);
    std::ostringstream csv;
    write_field_csv(csv, g);
    write_text_file(path(".field.csv"), csv.str());
    out.files.push_back(path(".field.csv"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification suite.

bool VerifyReport::all_passed() const {
  return std::all_of(lines.begin(), lines.end(), [](const VerifyLine& l) { return l.passed; });
}

namespace {

std::mt19937_64 instance_rng(std::uint64_t seed, long i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) >> 32)};
  return std::mt19937_64(seq);
}

struct Instance {
  PopulationState state;
  UtilitySpec u;
};

// Random state and utility; a share of draws lands on ties and case boundaries.
Instance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double gA = 0.05 + 0.9 * unit(rng);
  double piA = unit(rng), piB = unit(rng);
  const double kind = unit(rng);
  if (kind < 0.05) piB = piA;
  else if (kind < 0.08) piA = 0.0, piB = 0.0;
  else if (kind < 0.11) piA = 1.0;
  const double u1 = 2.0 * unit(rng);
  double u0 = -2.0 * unit(rng);
  const Group adv = piA >= piB ? Group::A : Group::B;
  const double g = adv == Group::A ? gA : 1.0 - gA;
  if (unit(rng) < 0.1) u0 = -g * u1 / (1.0 - g);
  return {PopulationState(piA, piB, gA), UtilitySpec(std::min(0.0, u0), u1)};
}

DynamicsSpec random_affine(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-0.4, 0.4), unit(0.0, 1.0);
  auto make = [&] {
    AffineResponse r{0.0, coef(rng), coef(rng)};
    const double lo = std::max(0.0, -r.k0) + std::max(0.0, -r.k1);
    const double hi = 1.0 - std::max(0.0, r.k0) - std::max(0.0, r.k1);
    r.c = lo + (hi - lo) * unit(rng);
    return r;
  };
  const AffineResponse f0 = make();
  const AffineResponse f1 = make();
  return affine_dynamics(f0, f1);
}

std::string fmt_max(const char* what, double v) {
  std::ostringstream os;
  os << what << "=" << v;
  return os.str();
}

}  // namespace

VerifyReport run_verify(std::uint64_t seed, int instances, Exec exec) {
  VerifyReport rep;
  const long n = instances;

  {
    std::vector<double> uErr(n), resid(n), unErr(n);
    kernels::for_each_index(exec, n, [&](long i) {
      auto rng = instance_rng(seed, i);
      const Instance in = random_instance(rng);
      const PolicySolution aa = aa_policy(in.state, in.u);
      const PolicySolution lp = lp_oracle(in.state, in.u, true);
      uErr[i] = std::abs(aa.achievedUtility - lp.achievedUtility);
      resid[i] = selection_rates(in.state, aa.policy).parity_residual();
      unErr[i] = std::abs(unconstrained_policy(in.state, in.u).achievedUtility -
                          lp_oracle(in.state, in.u, false).achievedUtility);
    });
    const double mu = *std::max_element(uErr.begin(), uErr.end());
    const double mr = *std::max_element(resid.begin(), resid.end());
    const double mun = *std::max_element(unErr.begin(), unErr.end());
    rep.lines.push_back({"aa-closed-form-vs-lp", mu <= 1e-9 && mr <= 1e-12,
                         fmt_max("max|dU|", mu) + " " + fmt_max("maxResidual", mr)});
    rep.lines.push_back({"un-closed-form-vs-lp", mun <= 1e-9, fmt_max("max|dU|", mun)});
  }

  {
    std::vector<double> gap(n);
    std::vector<char> bad(n, 0);
    kernels::for_each_index(exec, n, [&](long i) {
      auto rng = instance_rng(seed ^ 0x5157u, i);
      const Instance in = random_instance(rng);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const Group adv = advantaged_group(in.state);
      const double pDis = in.state.profile(other(adv)).p1();
      const double pAdv = in.state.profile(adv).p1();
      const double eDis = -pDis * unit(rng);
      const double eAdv = unit(rng) - pAdv;
      StereotypeSpec eps = adv == Group::A ? StereotypeSpec{eAdv, eDis} : StereotypeSpec{eDis, eAdv};
      if (eDis - eAdv > pAdv - pDis) (adv == Group::A ? eps.epsA : eps.epsB) = eDis - (pAdv - pDis);
      try {
        const Policy p = effective_policy(PolicyMode::AA1, in.state, in.u, eps);
        const SelectionRates r = selection_rates(in.state, p);
        gap[i] = std::abs(r.per_evaluation(1, Group::A) - r.per_evaluation(1, Group::B));
      } catch (const StereotypeError&) {
        bad[i] = 1;
      }
    });
    const double mg = *std::max_element(gap.begin(), gap.end());
    const long rejected = std::count(bad.begin(), bad.end(), 1);
    rep.lines.push_back({"aa1-negative-stereotype-rate-equality", mg <= 1e-12,
                         fmt_max("maxGap", mg) + " rejected=" + std::to_string(rejected)});
  }

  {
    const long cases = std::max(1L, n / 200);
    bool same = true;
    for (long i = 0; i < cases && same; ++i) {
      auto rng = instance_rng(seed ^ 0xa11eu, i);
      const DynamicsSpec dyn = random_affine(rng);
      const ContractionReport a = estimate_contraction(dyn, 64, Exec::Serial);
      const ContractionReport b = estimate_contraction(dyn, 64, Exec::Parallel);
      same = same && a.lUN == b.lUN && a.lAA1 == b.lAA1 && a.lAA2 == b.lAA2;
      const FieldGrid fa = export_field(dyn, PolicyMode::AA, {-1.0, 1.0}, 0.5, 21, Exec::Serial);
      const FieldGrid fb = export_field(dyn, PolicyMode::AA, {-1.0, 1.0}, 0.5, 21, Exec::Parallel);
      for (std::size_t k = 0; k < fa.points.size(); ++k)
        same = same && fa.points[k].dA == fb.points[k].dA && fa.points[k].dB == fb.points[k].dB;
    }
    rep.lines.push_back({"serial-parallel-kernels-agree", same, std::to_string(cases) + " random dynamics"});
  }

  {
    const DynamicsSpec builtin = appendix_c_dynamics();
    const DynamicsSpec parsed =
        parse_dynamics("(b1 + b1/5)/1.2 + 0.01",
                       "0.5*(b1 + b1/5)/1.4 + exp(-0.000000001*(b0+b1))*sin(18*(b0+b1)) + 0.1");
    const double worst = kernels::max_over_range(exec, n, [&](long i) {
      auto rng = instance_rng(seed ^ 0xe1u, i);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double b0 = unit(rng), b1 = unit(rng);
      return std::max(std::abs(builtin.raw_f0(b0, b1) - parsed.raw_f0(b0, b1)),
                      std::abs(builtin.raw_f1(b0, b1) - parsed.raw_f1(b0, b1)));
    });
    rep.lines.push_back({"expression-matches-builtin", worst <= 1e-12, fmt_max("max|diff|", worst)});
  }
  return rep;
}

}  // namespace fairdyn
