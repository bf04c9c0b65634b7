#pragma once

// Classification of a shot u(.; alpha) and the bound-state ladder
// alpha_0 < alpha_1 < ... found by bisection on the node count.

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "boundstate/errors.hpp"
#include "boundstate/integrator.hpp"
#include "boundstate/phase_portrait.hpp"
#include "boundstate/scalar_field.hpp"

namespace boundstate {

enum class ClassTag { Constant, Oscillatory, BoundStateCandidate, Indeterminate };

inline const char* to_string(ClassTag t) {
  switch (t) {
    case ClassTag::Constant: return "Constant";
    case ClassTag::Oscillatory: return "Oscillatory";
    case ClassTag::BoundStateCandidate: return "BoundStateCandidate";
    case ClassTag::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct Witness {
  std::optional<double> energy_nonpositive_r;
  double r_stop = 0.0;
  double u_stop = 0.0;
  // Decay evidence, taken where |u| first falls through decay_eps on a
  // monotone approach to zero.
  std::optional<double> decay_r;
  std::optional<double> decay_u;
  std::optional<double> slope_gap;      // |u'/u + 1|
  std::optional<double> corrected_gap;  // |u'/u + 1 + (n-1)/(2r)|
  std::string cause;
};

struct SolutionClass {
  ClassTag tag = ClassTag::Indeterminate;
  int node_count = 0;
  int oscillation_center = 0;  // +1 or -1 for Oscillatory
  Witness witness;
};

struct ClassifierOptions {
  double decay_eps = 1e-6;
  double slope_eps = 0.05;
};

// Decaying solutions of the linearized tail behave like
// r^{-(n-2)/2} K_{(n-2)/2}(r), so u'/u = -1 - (n-1)/(2r) + O(r^{-2}).
inline double corrected_slope_gap(const State& s, const FieldParams& fp) {
  return std::fabs(s.up / s.u + 1.0 + 0.5 * (fp.n - 1.0) / s.r);
}

// First radius where |u| crosses decay_eps downward with a tail-like
// logarithmic slope.
inline std::optional<double> decay_witness(const Trajectory& traj, const ClassifierOptions& opt) {
  const FieldParams fp = traj.field();
  const auto crossings = locate_roots(
      traj, [&](const State& s) { return std::fabs(s.u) - opt.decay_eps; }, EventTarget::ZeroU, traj.r_begin(),
      traj.r_end());
  for (const auto& c : crossings) {
    const State s = traj.eval(c.root);
    if (s.u == 0.0 || s.u * s.up >= 0.0) {
      continue;
    }
    if (corrected_slope_gap(s, fp) < opt.slope_eps) {
      return c.root;
    }
  }
  return std::nullopt;
}

inline int zeros_before(const Trajectory& traj, double r_end) {
  return static_cast<int>(locate_events(traj, EventTarget::ZeroU, traj.r_begin(), r_end).size());
}

inline SolutionClass classify(const ProblemParams& params, const ClassifierOptions& opt = {}) {
  params.validate();
  SolutionClass sc;
  if (params.alpha == 1.0) {
    sc.tag = ClassTag::Constant;
    sc.witness.cause = "alpha = 1 is the constant solution";
    sc.witness.u_stop = 1.0;
    return sc;
  }
  ProblemParams pp = params;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Trajectory traj = integrate(pp, StopPolicy::classification());
    const TerminationCause& tc = traj.termination();
    sc.witness.r_stop = tc.r_stop;
    sc.witness.u_stop = traj.eval(tc.r_stop).u;
    sc.witness.cause = std::string(to_string(tc.tag)) + (tc.detail.empty() ? "" : ": " + tc.detail);
    if (tc.failed()) {
      sc.tag = ClassTag::Indeterminate;
      return sc;
    }
    if (const auto rw = decay_witness(traj, opt)) {
      const State s = traj.eval(*rw);
      sc.tag = ClassTag::BoundStateCandidate;
      sc.node_count = zeros_before(traj, *rw);
      sc.witness.decay_r = *rw;
      sc.witness.decay_u = s.u;
      sc.witness.slope_gap = std::fabs(s.up / s.u + 1.0);
      sc.witness.corrected_gap = corrected_slope_gap(s, pp.field);
      return sc;
    }
    if (tc.tag == Termination::EnergyNonpositive) {
      sc.tag = ClassTag::Oscillatory;
      sc.node_count = count_nodes(traj);
      sc.oscillation_center = sc.witness.u_stop >= 0.0 ? 1 : -1;
      sc.witness.energy_nonpositive_r = tc.r_stop;
      return sc;
    }
    pp.controls.r_max *= 2.0;
  }
  sc.tag = ClassTag::Indeterminate;
  sc.witness.cause = "no E <= 0 and no decay evidence within doubled r_max";
  return sc;
}

enum class CountStatus { Final, NonFinal, Indeterminate };

inline const char* to_string(CountStatus s) {
  switch (s) {
    case CountStatus::Final: return "Final";
    case CountStatus::NonFinal: return "NonFinal";
    case CountStatus::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct NodeCount {
  int count = 0;
  CountStatus status = CountStatus::Indeterminate;
  double r_stop = 0.0;
  std::optional<double> first_zero;
  std::string detail;
};

// Final once E <= 0 is witnessed. A run that reaches r_max is repeated once
// with r_max doubled before the count is reported NonFinal.
inline NodeCount node_count_of_alpha(const FieldParams& field, double alpha, IntegratorControls controls) {
  NodeCount nc;
  ProblemParams pp{field, alpha, controls};
  pp.validate();
  if (alpha == 1.0) {
    nc.status = CountStatus::Final;
    nc.detail = "constant solution";
    return nc;
  }
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Trajectory traj = integrate(pp, StopPolicy::classification());
    const TerminationCause& tc = traj.termination();
    nc.r_stop = tc.r_stop;
    if (tc.failed()) {
      nc.status = CountStatus::Indeterminate;
      nc.detail = std::string(to_string(tc.tag)) + ": " + tc.detail;
      return nc;
    }
    nc.count = count_nodes(traj);
    if (nc.count > 0) {
      nc.first_zero = locate_events(traj, EventTarget::ZeroU, traj.r_begin(), traj.r_end()).front().root;
    }
    if (tc.tag == Termination::EnergyNonpositive) {
      nc.status = CountStatus::Final;
      return nc;
    }
    pp.controls.r_max *= 2.0;
  }
  nc.status = CountStatus::NonFinal;
  nc.detail = "reached doubled r_max without E <= 0";
  return nc;
}

struct LadderEntry {
  int k = 0;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  int nodes_lo = 0;
  int nodes_hi = 0;
  int evaluations = 0;
  std::string status = "ok";

  [[nodiscard]] bool ok() const { return status == "ok"; }
  [[nodiscard]] double midpoint() const { return 0.5 * (alpha_lo + alpha_hi); }
  [[nodiscard]] double half_width() const { return 0.5 * (alpha_hi - alpha_lo); }
};

struct AlphaLadder {
  FieldParams field;
  double tol = 0.0;
  IntegratorControls controls;
  std::vector<LadderEntry> entries;
};

inline constexpr double kAlphaCapFactor = 1e4;

inline LadderEntry find_alpha_k(const FieldParams& field, int k, double tol, const IntegratorControls& controls) {
  field.validate();
  if (k < 0) {
    throw ParameterError("ladder index k must be >= 0");
  }
  if (!(tol > 0.0)) {
    throw ParameterError("ladder tolerance must be positive");
  }
  const CriticalAmplitudes ca = critical_amplitudes(field);
  std::vector<std::pair<double, int>> seen;
  auto count = [&](double a) {
    const NodeCount nc = node_count_of_alpha(field, a, controls);
    if (nc.status == CountStatus::Indeterminate) {
      std::ostringstream oss;
      oss.precision(17);
      oss << "node count indeterminate at alpha = " << a << " (" << nc.detail << ")";
      throw IndeterminateCount(oss.str());
    }
    seen.emplace_back(a, nc.count);
    return nc.count;
  };

  double lo = 1.01 * ca.alpha_upper_star;
  double hi = 2.0 * ca.alpha_upper_star;
  int n_lo = count(lo);
  if (n_lo > k) {
    lo = ca.alpha_upper_star;
    n_lo = count(lo);
  }
  int n_hi = count(hi);
  const double cap = kAlphaCapFactor * ca.alpha_upper_star;
  while (n_hi < k + 1) {
    lo = hi;
    n_lo = n_hi;
    hi *= 2.0;
    if (hi > cap) {
      std::ostringstream oss;
      oss << "no alpha below " << cap << " has " << k + 1 << " nodes";
      throw BracketNotFound(oss.str());
    }
    n_hi = count(hi);
  }
  if (n_lo > k) {
    throw MonotonicityViolation("lower bracket end already has more than k nodes");
  }
  while (hi - lo > tol * lo) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const int nm = count(mid);
    if (nm <= k) {
      lo = mid;
      n_lo = nm;
    } else {
      hi = mid;
      n_hi = nm;
    }
  }

  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 1; i < seen.size(); ++i) {
    if (seen[i].second < seen[i - 1].second) {
      std::ostringstream oss;
      oss.precision(17);
      oss << "N(" << seen[i - 1].first << ") = " << seen[i - 1].second << " > N(" << seen[i].first
          << ") = " << seen[i].second;
      throw MonotonicityViolation(oss.str());
    }
  }
  if (n_lo != k || n_hi != k + 1) {
    std::ostringstream oss;
    oss.precision(17);
    oss << "bracket [" << lo << ", " << hi << "] has counts (" << n_lo << ", " << n_hi << "), expected (" << k
        << ", " << k + 1 << ")";
    throw MonotonicityViolation(oss.str());
  }
  LadderEntry e;
  e.k = k;
  e.alpha_lo = lo;
  e.alpha_hi = hi;
  e.nodes_lo = n_lo;
  e.nodes_hi = n_hi;
  e.evaluations = static_cast<int>(seen.size());
  return e;
}

// One bisection per k, run concurrently. A failed k is recorded in its
// entry's status rather than aborting the others.
inline AlphaLadder build_ladder(const FieldParams& field, const std::vector<int>& ks, double tol,
                                const IntegratorControls& controls) {
  field.validate();
  AlphaLadder ladder{field, tol, controls, {}};
  std::vector<std::future<LadderEntry>> jobs;
  jobs.reserve(ks.size());
  for (int k : ks) {
    jobs.push_back(std::async(std::launch::async, [=] {
      try {
        return find_alpha_k(field, k, tol, controls);
      } catch (const Error& e) {
        LadderEntry bad;
        bad.k = k;
        bad.status = std::string("failed: ") + e.what();
        return bad;
      }
    }));
  }
  for (auto& j : jobs) {
    ladder.entries.push_back(j.get());
  }
  return ladder;
}

struct ZeroScanReport {
  bool pass = true;
  int index = 1;
  std::vector<std::pair<double, double>> zeros;  // (alpha, z_i(alpha))
  std::string notes;
};

inline ZeroScanReport zero_monotonicity_scan(const FieldParams& field, const std::vector<double>& alphas, int i,
                                             const IntegratorControls& controls = {}) {
  ZeroScanReport rep;
  rep.index = i;
  for (double a : alphas) {
    ProblemParams pp{field, a, controls};
    const Trajectory traj = integrate(pp, StopPolicy::classification());
    const auto zs = locate_events(traj, EventTarget::ZeroU, traj.r_begin(), traj.r_end());
    if (static_cast<int>(zs.size()) < i) {
      rep.pass = false;
      std::ostringstream oss;
      oss << "alpha = " << a << " has fewer than " << i << " zeros; ";
      rep.notes += oss.str();
      continue;
    }
    rep.zeros.emplace_back(a, zs[static_cast<std::size_t>(i - 1)].root);
  }
  for (std::size_t j = 1; j < rep.zeros.size(); ++j) {
    if (!(rep.zeros[j].first > rep.zeros[j - 1].first)) {
      rep.pass = false;
      rep.notes += "alphas not increasing; ";
    } else if (!(rep.zeros[j].second < rep.zeros[j - 1].second)) {
      rep.pass = false;
      std::ostringstream oss;
      oss.precision(17);
      oss << "z_" << i << " not decreasing at alpha = " << rep.zeros[j].first << "; ";
      rep.notes += oss.str();
    }
  }
  if (rep.zeros.size() <= 1 && rep.notes.empty()) {
    rep.notes = "vacuous";
  }
  return rep;
}

}  // namespace boundstate
