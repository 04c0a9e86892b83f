#include "fairdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fairdyn {

using kernels::Exec;

const char* to_string(ContractionMethod m) {
  return m == ContractionMethod::Grid ? "grid" : "grid+declared-constants";
}

ContractionReport estimate_contraction(const DynamicsSpec& dyn, int resolution, Exec exec) {
  if (resolution < kMinGridResolution) {
    std::ostringstream os;
    os << "grid resolution must be >= " << kMinGridResolution << ", got " << resolution;
    throw ValidationError(os.str());
  }
  const long n = resolution;
  const long side = n + 1;
  const auto at = [side](long i, long j) { return i * side + j; };
  const auto coord = [n](long i) { return static_cast<double>(i) / static_cast<double>(n); };

  // Clamped responses on the (b0, b1) grid.
  std::vector<double> t0(side * side), t1(side * side);
  kernels::for_each_index(exec, side * side, [&](long k) {
    const Response r = dyn.respond(coord(k / side), coord(k % side));
    t0[k] = r.f0;
    t1[k] = r.f1;
  });

  ContractionReport rep;
  rep.gridResolution = resolution;
  if (dyn.has_declared_constants()) {
    rep.method = ContractionMethod::GridWithDeclaredConstants;
    rep.L0 = *dyn.declaredL0();
    rep.L1 = *dyn.declaredL1();
  } else {
    // Largest l1 finite-difference ratio over neighbouring grid nodes.
    auto ratio = [&](const std::vector<double>& t) {
      return kernels::max_over_range(exec, side * side, [&](long k) {
        constexpr long offsets[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
        const long i = k / side, j = k % side;
        double best = 0.0;
        for (const auto& o : offsets) {
          const long ni = i + o[0], nj = j + o[1];
          if (ni >= side || nj < 0 || nj >= side) continue;
          const double dist = static_cast<double>(std::abs(o[0]) + std::abs(o[1])) / static_cast<double>(n);
          best = std::max(best, std::abs(t[at(ni, nj)] - t[k]) / dist);
        }
        return best;
      });
    };
    rep.L0 = ratio(t0);
    rep.L1 = ratio(t1);
  }
  const double L0 = rep.L0, L1 = rep.L1;
  const auto stability = [&](long p) { return coord(p) * L1 + (1.0 - coord(p)) * L0; };

  // Gap |f1(0,x) - f0(0,x)| along b0 = 0 and its running maximum over x <= pi.
  std::vector<double> gap(side), prefix(side);
  for (long q = 0; q < side; ++q) {
    gap[q] = std::abs(t1[at(0, q)] - t0[at(0, q)]);
    prefix[q] = q == 0 ? gap[q] : std::max(prefix[q - 1], gap[q]);
  }
  rep.lAA1 = *std::max_element(gap.begin(), gap.end());
  rep.lUN = kernels::max_over_range(exec, side, [&](long p) { return stability(p) + prefix[p]; });
  // 0 <= Delta <= pi <= 1 at (b0, b1) = (Delta, pi - Delta).
  rep.lAA2 = kernels::max_over_range(exec, side, [&](long p) {
    double best = 0.0;
    for (long d = 0; d <= p; ++d) best = std::max(best, std::abs(t1[at(d, p - d)] - t0[at(d, p - d)]));
    return 2.0 * stability(p) + best;
  });

  if (rep.method == ContractionMethod::GridWithDeclaredConstants) {
    const double slack = (L0 + L1) * 2.0 / static_cast<double>(n);
    rep.lUNUpper = rep.lUN + slack;
    rep.lAA1Upper = rep.lAA1 + slack;
    rep.lAA2Upper = rep.lAA2 + slack;
  }
  rep.isContractiveUN = rep.boundUN() < 1.0 - kContractivityMargin;
  rep.isContractiveAA1 = rep.boundAA1() < 1.0 - kContractivityMargin;
  rep.isContractiveAA2 = rep.boundAA2() < 1.0 - kContractivityMargin;
  return rep;
}

StatusQuoCheck check_status_quo_bias(const DynamicsSpec& dyn, int resolution, Exec exec) {
  if (resolution < kMinGridResolution) throw ValidationError("grid resolution must be >= 64");
  const long n = resolution, side = n + 1;
  const auto coord = [n](long i) { return static_cast<double>(i) / static_cast<double>(n); };
  const long first = kernels::first_index_where(exec, side * side, [&](long k) {
    const Response r = dyn.respond(coord(k / side), coord(k % side));
    return r.f1 < r.f0 - 1e-12;
  });
  StatusQuoCheck out;
  if (first >= 0) {
    out.holds = false;
    out.counterexample = std::make_pair(coord(first / side), coord(first % side));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Equilibria of the unconstrained one-dimensional map.

int EquilibriumAtlas::basin_of(double pi) const {
  constexpr double tol = 1e-12;
  for (const auto& d : unstable)
    if (std::abs(pi - d.pi) <= tol) return -1;
  for (std::size_t i = 0; i < attracting.size(); ++i) {
    // Open interval between the neighbouring unstable points; [0,1] edges are
    // included when no unstable point bounds that side.
    double lo = -1.0, hi = 2.0;
    for (const auto& d : unstable) {
      if (d.pi < attracting[i].pi) lo = std::max(lo, d.pi);
      if (d.pi > attracting[i].pi) hi = std::min(hi, d.pi);
    }
    if (pi > lo && pi < hi) return static_cast<int>(i);
  }
  return -1;
}

namespace {

constexpr double kZeroTol = 1e-13;       // |f(pi) - pi| treated as an exact grid root
constexpr double kContinuumTol = 1e-12;  // a whole cell this flat is a continuum
constexpr double kRootWidth = 1e-12;
constexpr double kDiffStep = 1e-6;

int tsign(double x) { return x > kZeroTol ? 1 : (x < -kZeroTol ? -1 : 0); }

double slope_of(const DynamicsSpec& dyn, double pi) {
  const double lo = std::max(0.0, pi - kDiffStep);
  const double hi = std::min(1.0, pi + kDiffStep);
  return (dyn.un_map(hi) - dyn.un_map(lo)) / (hi - lo);
}

struct RawRoot {
  double pi;
  int leftSign;   // sign of f - pi just left (0 at pi = 0)
  int rightSign;  // sign just right (0 at pi = 1)
};

}  // namespace

EquilibriumAtlas find_equilibria(const DynamicsSpec& dyn, TimeMode mode, int cells, Exec exec) {
  if (cells < 2) throw ValidationError("equilibrium scan needs at least 2 cells");
  EquilibriumAtlas atlas;
  atlas.mode = mode;
  const long n = cells;
  const auto coord = [n](long i) { return static_cast<double>(i) / static_cast<double>(n); };
  const auto g = [&](double pi) { return dyn.un_map(pi) - pi; };

  std::vector<double> gv(n + 1);
  kernels::for_each_index(exec, n + 1, [&](long k) { gv[k] = g(coord(k)); });

  for (long k = 0; k < n; ++k) {
    if (std::abs(gv[k]) < kContinuumTol && std::abs(gv[k + 1]) < kContinuumTol &&
        std::abs(g(0.5 * (coord(k) + coord(k + 1)))) < kContinuumTol) {
      atlas.degenerateContinuum = true;
      std::ostringstream os;
      os << "degenerate continuum: f(pi) = pi on [" << coord(k) << ", " << coord(k + 1) << "]";
      atlas.notes.push_back(os.str());
      atlas.kValid = false;
      return atlas;
    }
  }

  std::vector<RawRoot> roots;
  auto nonzero_sign_left = [&](long k) {
    for (long i = k; i >= 0; --i)
      if (tsign(gv[i]) != 0) return tsign(gv[i]);
    return 0;
  };
  auto nonzero_sign_right = [&](long k) {
    for (long i = k; i <= n; ++i)
      if (tsign(gv[i]) != 0) return tsign(gv[i]);
    return 0;
  };

  for (long k = 0; k <= n; ++k) {
    const int s = tsign(gv[k]);
    if (s == 0) {
      // Grid point that is itself (numerically) a root; collapse runs.
      long e = k;
      while (e + 1 <= n && tsign(gv[e + 1]) == 0) ++e;
      const double pi = 0.5 * (coord(k) + coord(e));
      roots.push_back({pi, k > 0 ? nonzero_sign_left(k - 1) : 0, e < n ? nonzero_sign_right(e + 1) : 0});
      k = e;
      continue;
    }
    if (k < n && tsign(gv[k + 1]) == -s) {
      double lo = coord(k), hi = coord(k + 1);
      while (hi - lo > kRootWidth) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        ((gm > 0.0) == (s > 0) ? lo : hi) = mid;
      }
      double pi = 0.5 * (lo + hi);
      if (std::abs(g(lo)) < std::abs(g(pi))) pi = lo;
      if (std::abs(g(hi)) < std::abs(g(pi))) pi = hi;
      roots.push_back({pi, s, -s});
    }
  }

  // Classify.
  std::vector<std::pair<EquilibriumPoint, bool>> classified;  // (point, attracting)
  for (const auto& r : roots) {
    EquilibriumPoint p;
    p.pi = r.pi;
    p.residual = std::abs(g(r.pi));
    p.slope = slope_of(dyn, r.pi);
    const double gslope = p.slope - 1.0;
    bool attracting;
    const bool flat = std::abs(gslope) < 1e-9;
    const bool signPattern = (r.leftSign > 0 || r.pi == 0.0) && (r.rightSign < 0 || r.pi == 1.0);
    if (mode == TimeMode::CT) {
      attracting = flat ? signPattern : gslope < 0.0;
    } else {
      attracting = flat ? signPattern : std::abs(p.slope) < 1.0;
    }
    if (p.residual > 1e-10) {
      std::ostringstream os;
      os << "root near " << r.pi << " has residual " << p.residual;
      atlas.notes.push_back(os.str());
    }
    classified.emplace_back(p, attracting);
  }

  // Local rate bounds on neighbourhoods not reaching the adjacent roots.
  for (std::size_t i = 0; i < classified.size(); ++i) {
    auto& p = classified[i].first;
    double room = 0.05;
    if (i > 0) room = std::min(room, 0.5 * (p.pi - classified[i - 1].first.pi));
    if (i + 1 < classified.size()) room = std::min(room, 0.5 * (classified[i + 1].first.pi - p.pi));
    p.radius = room;
    double sup = -std::numeric_limits<double>::infinity();
    constexpr int samples = 32;
    for (int s = 0; s <= samples; ++s) {
      const double x = std::clamp(p.pi - room + 2.0 * room * s / samples, 0.0, 1.0);
      sup = std::max(sup, slope_of(dyn, x));
    }
    p.localRate = std::max(0.0, sup);
  }

  for (const auto& [p, attr] : classified) (attr ? atlas.attracting : atlas.unstable).push_back(p);

  // Interleaving (interior unstable points strictly between attracting ones)
  // and the basin conditions on the scan grid.
  bool valid = !atlas.attracting.empty();
  std::vector<std::pair<double, bool>> seq;
  for (const auto& [p, attr] : classified) {
    const bool endpointUnstable = !attr && (p.pi == 0.0 || p.pi == 1.0);
    if (!endpointUnstable) seq.emplace_back(p.pi, attr);
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const bool expectAttracting = i % 2 == 0;
    if (seq[i].second != expectAttracting) valid = false;
  }
  if (!seq.empty() && !seq.back().second) valid = false;
  if (!valid) atlas.notes.push_back("attracting and unstable points do not interleave");

  if (valid) {
    for (std::size_t i = 0; i < atlas.attracting.size(); ++i) {
      const double e = atlas.attracting[i].pi;
      double lo = 0.0, hi = 1.0;
      for (const auto& d : atlas.unstable) {
        if (d.pi < e) lo = std::max(lo, d.pi);
        if (d.pi > e) hi = std::min(hi, d.pi);
      }
      for (long k = 0; k <= n && valid; ++k) {
        const double x = coord(k);
        if (x <= lo || x >= hi || std::abs(x - e) < 1e-9) continue;
        const double fx = dyn.un_map(x);
        if (x < e) {
          if (!(fx > x)) valid = false;
          if (mode == TimeMode::DT && !(fx < e)) valid = false;
        } else {
          if (!(fx < x)) valid = false;
          if (mode == TimeMode::DT && !(fx > e)) valid = false;
        }
        if (!valid) {
          std::ostringstream os;
          os << "basin condition fails at pi=" << x << " around equilibrium " << e;
          atlas.notes.push_back(os.str());
        }
      }
      if (mode == TimeMode::DT && !(atlas.attracting[i].localRate < 1.0)) {
        valid = false;
        atlas.notes.push_back("local slope bound >= 1 near an attracting point");
      }
    }
  }
  atlas.kValid = valid;
  return atlas;
}

DeltaBounds delta_bounds(double L, double delta0, double t, TimeMode mode) {
  if (!(L >= 0.0 && L < 1.0)) throw ValidationError("delta bounds require 0 <= L < 1");
  if (!(delta0 >= 0.0)) throw ValidationError("delta0 must be nonnegative");
  if (!(t >= 0.0)) throw ValidationError("t must be nonnegative");
  if (mode == TimeMode::CT) return {delta0 * std::exp(-t * (1.0 + L)), delta0 * std::exp(-t * (1.0 - L))};
  return {0.0, 2.0 * delta0 * std::pow(L, t)};
}

Theorem2Verdict theorem2_verdict(double lUN, double lAA2, double gA, const UtilitySpec& u) {
  const double num = (1.0 - gA) * u.u1();
  const double den = num + std::abs(u.u0());
  if (!(den > 0.0)) throw ValidationError("utility verdict needs (1 - gA) u1 + |u0| > 0");
  Theorem2Verdict v;
  v.alpha = num / den;
  v.lowerThreshold = 1.0 - v.alpha;
  v.lowerOK = lUN >= v.lowerThreshold;
  if (v.alpha > 0.0) {
    v.upperThreshold = 1.0 + (lUN - 1.0) / v.alpha;
    v.upperOK = lAA2 <= v.upperThreshold;
  } else {
    v.upperThreshold = -std::numeric_limits<double>::infinity();
    v.upperOK = false;
  }
  v.applies = v.lowerOK && v.upperOK && lUN < 1.0 && lAA2 < 1.0;
  return v;
}

namespace {

ModeLimit run_to_limit(const DynamicsSpec& dyn, const PopulationState& state0, const UtilitySpec& u,
                       PolicyMode mode, const Theorem4Options& opts) {
  const PolicyProvider provider = make_policy_provider(mode, u);
  const long chunkSteps = std::max(1L, std::lround(opts.chunk / opts.h));
  PopulationState s = state0;
  ModeLimit lim;
  lim.mode = mode;
  double t = 0.0;
  while (true) {
    const CtDerivative d = ct_derivative(s, provider(s, t).policy, dyn);
    if (std::max(std::abs(d.dA), std::abs(d.dB)) < opts.derivativeTol) {
      lim.converged = true;
      break;
    }
    if (t >= opts.tCap) break;
    s = ct_endpoint(provider, s, dyn, opts.chunk, chunkSteps);
    t += opts.chunk;
  }
  lim.time = t;
  lim.piA = s.piA().p1();
  lim.piB = s.piB().p1();
  lim.utilityAtLimit = utility(s, provider(s, t).policy, u);
  lim.equalized = std::abs(lim.piA - lim.piB) < opts.limitTol;
  return lim;
}

}  // namespace

Theorem4Comparison theorem4_limits(const DynamicsSpec& dyn, const PopulationState& state0, const UtilitySpec& u,
                                   const Theorem4Options& opts) {
  Theorem4Comparison out;
  out.atlas = find_equilibria(dyn, TimeMode::CT);
  if (!out.atlas.kValid) throw ValidationError("dynamics '" + dyn.name() + "' is not a valid k-equilibrium map");

  out.advantaged = advantaged_group(state0);
  out.basinA = out.atlas.basin_of(state0.piA().p1());
  out.basinB = out.atlas.basin_of(state0.piB().p1());
  if (out.basinA < 0 || out.basinB < 0) out.notes.push_back("an initial profile sits on a basin delimiter");

  out.un = run_to_limit(dyn, state0, u, PolicyMode::UN, opts);
  out.aa1 = run_to_limit(dyn, state0, u, PolicyMode::AA1, opts);
  out.aa2 = run_to_limit(dyn, state0, u, PolicyMode::AA2, opts);
  out.allConverged = out.un.converged && out.aa1.converged && out.aa2.converged;
  for (const ModeLimit* m : {&out.un, &out.aa1, &out.aa2})
    if (!m->converged) out.notes.push_back(std::string(to_string(m->mode)) + " did not converge by tEnd");

  if (out.basinA >= 0 && out.basinB >= 0) {
    const double eA = out.atlas.attracting[out.basinA].pi;
    const double eB = out.atlas.attracting[out.basinB].pi;
    const double eDis = out.advantaged == Group::A ? eB : eA;
    const double eAdv = out.advantaged == Group::A ? eA : eB;
    const double tol = opts.limitTol;
    out.unMatches = std::abs(out.un.piA - eA) <= tol && std::abs(out.un.piB - eB) <= tol;
    out.aa1Matches = std::abs(out.aa1.piA - eDis) <= tol && std::abs(out.aa1.piB - eDis) <= tol;
    if (out.aa2.equalized)
      out.aa2Matches = std::abs(out.aa2.piA - eAdv) <= tol && std::abs(out.aa2.piB - eAdv) <= tol;
  }
  if (out.allConverged && out.aa2.equalized) {
    out.utilityOrderingHolds = out.aa1.utilityAtLimit <= out.un.utilityAtLimit + 1e-9 &&
                               out.un.utilityAtLimit <= out.aa2.utilityAtLimit + 1e-9;
  }
  return out;
}

Prop3Persistence prop3_case_persistence(double gA, const UtilitySpec& u) {
  if (!(gA > 0.0 && gA < 1.0)) throw ValidationError("group share gA must lie in (0,1)");
  const double sA = gA * u.u1() + (1.0 - gA) * u.u0();
  const double gB = 1.0 - gA;
  const double sB = gB * u.u1() + (1.0 - gB) * u.u0();
  Prop3Persistence p;
  p.aa1UnderA = sA <= 0.0;
  p.aa1UnderB = sB <= 0.0;
  p.aa2UnderA = sA >= 0.0;
  p.aa2UnderB = sB >= 0.0;
  p.alwaysAA1 = p.aa1UnderA && p.aa1UnderB;
  p.alwaysAA2 = p.aa2UnderA && p.aa2UnderB;
  return p;
}

}  // namespace fairdyn
