#pragma once

// Verification suite: runs the structural, sign and identity checks on a set
// of (n, p) cases and collects one record per (case, check).

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "boundstate/aux_functionals.hpp"
#include "boundstate/classifier.hpp"
#include "boundstate/errors.hpp"
#include "boundstate/integrator.hpp"
#include "boundstate/phase_portrait.hpp"
#include "boundstate/scalar_field.hpp"

namespace boundstate {

enum class CaseFamily { GroundBracket, BoundBracket, Oscillatory, Explicit };

inline const char* to_string(CaseFamily f) {
  switch (f) {
    case CaseFamily::GroundBracket: return "GroundBracket";
    case CaseFamily::BoundBracket: return "BoundBracket";
    case CaseFamily::Oscillatory: return "Oscillatory";
    case CaseFamily::Explicit: return "Explicit";
  }
  return "?";
}

struct VerificationCase {
  FieldParams field;
  CaseFamily family = CaseFamily::Explicit;
  int k = 0;           // BoundBracket
  double alpha = 1.0;  // Oscillatory, Explicit

  [[nodiscard]] bool bracket() const {
    return family == CaseFamily::GroundBracket || family == CaseFamily::BoundBracket;
  }
  [[nodiscard]] int ladder_index() const { return family == CaseFamily::GroundBracket ? 0 : k; }

  [[nodiscard]] std::string id() const {
    std::ostringstream oss;
    oss << "n=" << field.n << ",p=" << field.p << ",";
    switch (family) {
      case CaseFamily::GroundBracket: oss << "GroundBracket"; break;
      case CaseFamily::BoundBracket: oss << "BoundBracket(" << k << ")"; break;
      case CaseFamily::Oscillatory: oss << "Oscillatory(" << alpha << ")"; break;
      case CaseFamily::Explicit: oss << "Explicit(" << alpha << ")"; break;
    }
    return oss.str();
  }
};

inline const std::vector<std::string>& all_check_ids() {
  static const std::vector<std::string> ids{
      "cross_tolerance",     "energy_monotone",        "velocity_bound",   "positivity_energy",
      "omega_monotone",      "pohozaev_decrease",      "first_phase_window", "phase_windows",
      "renewability",        "tango",                  "tau_localization", "v_divergence",
      "unique_inflection",   "critical_amplitude_decrease", "tail_dichotomy", "reflection_inequality",
      "bridge_integral",     "identity_residuals",     "connection_identity", "tail_asymptotics",
      "ladder_jump"};
  return ids;
}

struct VerificationPlan {
  std::vector<VerificationCase> cases;
  std::vector<std::string> checks;
  IntegratorControls controls;
  double bracket_tol = 1e-13;
  double decay_eps = 1e-6;
  int probes = 64;

  void validate() const {
    if (cases.empty()) {
      throw ParameterError("verification plan has no cases");
    }
    if (checks.empty()) {
      throw ParameterError("verification plan has no checks");
    }
    const auto& known = all_check_ids();
    std::set<std::string> seen;
    for (const auto& c : checks) {
      if (std::find(known.begin(), known.end(), c) == known.end()) {
        throw ParameterError("unknown check id: " + c);
      }
      if (!seen.insert(c).second) {
        throw ParameterError("duplicate check id: " + c);
      }
    }
    for (const auto& c : cases) {
      c.field.validate();
      if (c.family == CaseFamily::BoundBracket && c.k < 1) {
        throw ParameterError("BoundBracket needs k >= 1");
      }
      if (!c.bracket() && !(c.alpha > 0.0)) {
        throw ParameterError("case alpha must be positive");
      }
    }
    if (!(bracket_tol > 0.0) || !(decay_eps > 0.0) || probes < 1) {
      throw ParameterError("bracket_tol, decay_eps and probes must be positive");
    }
    controls.validate(1.0);
  }
};

enum class CheckStatus { Pass, Fail, SkippedUndefined };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::SkippedUndefined: return "skipped-undefined";
  }
  return "?";
}

struct CheckRecord {
  std::string check;
  std::string case_id;
  CheckStatus status = CheckStatus::Pass;
  double worst_margin = 0.0;
  int probe_count = 0;
  std::string notes;
};

struct VerificationReport {
  std::vector<CheckRecord> records;

  [[nodiscard]] int failures() const {
    return static_cast<int>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return r.status == CheckStatus::Fail; }));
  }
  [[nodiscard]] bool all_passed() const { return failures() == 0; }
  [[nodiscard]] const CheckRecord* find(const std::string& case_id, const std::string& check) const {
    for (const auto& r : records) {
      if (r.case_id == case_id && r.check == check) return &r;
    }
    return nullptr;
  }
};

// Relative slack for sign claims: value > -kSignSlack * scale.
inline constexpr double kSignSlack = 1e-9;

// Trajectory and event data shared by the checks of one case.
struct CaseData {
  VerificationCase vc;
  double alpha = 1.0;
  std::optional<LadderEntry> bracket;
  Trajectory full;
  Trajectory view;  // full, or the bracket shot truncated before departure
  PhasePortrait portrait;       // of view
  PhasePortrait full_portrait;  // of full
  int k = 0;                    // zeros of u on view
  int covered = 0;              // phases whose c_i lies inside the claim range
  bool bound = false;
  bool constant = false;
  std::optional<double> r_trunc;
  double claim_end = 0.0;  // right end of the range where positivity claims apply
};

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream oss;
  oss.precision(6);
  oss << x;
  return oss.str();
}

// Sample radii in [lo, hi] (endpoints added by dense evaluation).
inline std::vector<double> radii_in(const Trajectory& t, double lo, double hi, bool with_lo = true,
                                    bool with_hi = true) {
  std::vector<double> rs;
  lo = std::max(lo, t.r_begin());
  hi = std::min(hi, t.r_end());
  if (hi < lo) return rs;
  if (with_lo) rs.push_back(lo);
  for (const auto& s : t.samples()) {
    if (s.r > lo && s.r < hi) rs.push_back(s.r);
  }
  if (with_hi && hi > lo) rs.push_back(hi);
  return rs;
}

struct SignTally {
  double min_norm = HUGE_VAL;  // min value / scale
  double worst_r = 0.0;
  int count = 0;
  [[nodiscard]] bool pass() const { return count == 0 || min_norm > -kSignSlack; }
};

inline SignTally positivity(const Trajectory& t, const std::vector<double>& rs,
                            const std::function<std::optional<double>(const State&)>& value) {
  std::vector<std::pair<double, double>> vals;
  double scale = 0.0;
  for (double r : rs) {
    const auto v = value(t.eval(r));
    if (!v) continue;
    vals.emplace_back(r, *v);
    scale = std::max(scale, std::fabs(*v));
  }
  SignTally tally;
  tally.count = static_cast<int>(vals.size());
  if (scale == 0.0) {
    tally.min_norm = vals.empty() ? HUGE_VAL : 0.0;
    return tally;
  }
  for (const auto& [r, v] : vals) {
    if (v / scale < tally.min_norm) {
      tally.min_norm = v / scale;
      tally.worst_r = r;
    }
  }
  return tally;
}

// Accumulates sub-claims into one record.
struct Ledger {
  bool pass = true;
  double worst = HUGE_VAL;
  int probes = 0;
  std::vector<std::string> notes;

  void sign(const std::string& what, const SignTally& t) {
    probes += t.count;
    if (t.count == 0) return;
    worst = std::min(worst, t.min_norm);
    if (!t.pass()) {
      pass = false;
      notes.push_back(what + " fails at r=" + fmt(t.worst_r) + " (" + fmt(t.min_norm) + ")");
    }
  }
  void claim(const std::string& what, bool ok, double margin) {
    ++probes;
    worst = std::min(worst, margin);
    if (!ok) {
      pass = false;
      notes.push_back(what + " (" + fmt(margin) + ")");
    }
  }
  void note(std::string s) { notes.push_back(std::move(s)); }

  CheckRecord record(const std::string& check, const std::string& case_id) const {
    CheckRecord rec;
    rec.check = check;
    rec.case_id = case_id;
    rec.status = pass ? CheckStatus::Pass : CheckStatus::Fail;
    rec.worst_margin = worst == HUGE_VAL ? 0.0 : worst;
    rec.probe_count = probes;
    for (std::size_t i = 0; i < notes.size(); ++i) {
      rec.notes += (i ? "; " : "") + notes[i];
    }
    if (rec.notes.empty() && probes == 0) rec.notes = "vacuous";
    return rec;
  }
};

inline CheckRecord skipped(const std::string& check, const std::string& case_id, std::string why) {
  CheckRecord rec;
  rec.check = check;
  rec.case_id = case_id;
  rec.status = CheckStatus::SkippedUndefined;
  rec.notes = std::move(why);
  return rec;
}

// Radius at which a bracket shot stops tracking the bound state: the first
// downward crossing of |u| = level after the critical point c_k, or the next
// event of u if |u| never gets that small.
inline double truncation_radius(const Trajectory& t, int k, double level) {
  const auto zs = locate_events(t, EventTarget::ZeroU, t.r_begin(), t.r_end());
  const auto cs = locate_events(t, EventTarget::ZeroUp, t.r_begin(), t.r_end());
  double ck = t.r_begin();
  if (k > 0) {
    if (static_cast<int>(zs.size()) < k) {
      throw MissingEvents("bracket shot has fewer than k zeros");
    }
    const double zk = zs[static_cast<std::size_t>(k - 1)].root;
    auto it = std::find_if(cs.begin(), cs.end(), [&](const auto& c) { return c.root > zk; });
    if (it == cs.end()) {
      throw MissingEvents("bracket shot has no critical point after z_k");
    }
    ck = it->root;
  }
  double next = t.r_end();
  for (const auto& c : cs) {
    if (c.root > ck) {
      next = std::min(next, c.root);
      break;
    }
  }
  for (const auto& z : zs) {
    if (z.root > ck) {
      next = std::min(next, z.root);
      break;
    }
  }
  const auto cross = locate_roots(
      t, [&](const State& s) { return std::fabs(s.u) - level; }, EventTarget::ZeroU, ck, next);
  return cross.empty() ? next : cross.front().root;
}

inline std::optional<double> first_v_zero_after(const PhasePortrait& pp, double r) {
  for (const auto& e : pp.zeros_v) {
    if (e.r > r) return e.r;
  }
  return std::nullopt;
}

}  // namespace detail

inline CaseData prepare_case(const VerificationCase& vc, const VerificationPlan& plan) {
  CaseData cd;
  cd.vc = vc;
  cd.bound = vc.bracket();
  if (cd.bound) {
    cd.bracket = find_alpha_k(vc.field, vc.ladder_index(), plan.bracket_tol, plan.controls);
    cd.alpha = cd.bracket->midpoint();
  } else {
    cd.alpha = vc.alpha;
  }
  cd.constant = cd.alpha == 1.0;
  ProblemParams pp{vc.field, cd.alpha, plan.controls};
  cd.full = integrate(pp, StopPolicy::verification());
  cd.full_portrait = detect_events(cd.full);
  if (cd.bound) {
    cd.r_trunc = detail::truncation_radius(cd.full, vc.ladder_index(), 10.0 * plan.decay_eps);
    cd.view = cd.full.truncated(*cd.r_trunc);
  } else {
    cd.view = cd.full;
  }
  cd.portrait = cd.bound ? detect_events(cd.view) : cd.full_portrait;
  cd.k = cd.portrait.node_count();
  if (cd.bound) {
    cd.covered = cd.k;
    cd.claim_end = cd.view.r_end();
  } else {
    cd.covered = std::max(0, cd.k - 1);
    cd.claim_end = cd.k > 0 ? cd.portrait.zeros_u.back().r : cd.view.r_begin();
  }
  return cd;
}

// Q, M, T2 > 0 at each covered c_i; Q(b_bar_i) > Q(b_i); T2 > 0 on
// [c_{i-1}, b_i]. Q's sign inside (b_i, b_bar_i) is recorded only.
inline CheckRecord renewability_audit(const Trajectory& traj, const PhasePortrait& portrait, const FieldParams& field,
                                      int phases, const std::string& case_id = "") {
  detail::Ledger L;
  int audited = 0;
  int truncated = 0;
  for (int i = 1; i <= phases; ++i) {
    const PhaseLabels* ph = portrait.phase(i);
    if (ph == nullptr || !ph->c || !ph->b || !ph->b_bar) {
      ++truncated;
      continue;
    }
    ++audited;
    const std::string tag = "phase " + std::to_string(i);
    const AuxSample ac = eval_aux(traj.eval(ph->c->r), field);
    const double sc = std::max({std::fabs(ac.Q), std::fabs(ac.M), ac.T2 ? std::fabs(*ac.T2) : 0.0, 1e-300});
    L.claim(tag + ": Q(c) > 0", ac.Q > 0.0, ac.Q / sc);
    L.claim(tag + ": M(c) > 0", ac.M > 0.0, ac.M / sc);
    if (ac.T2) L.claim(tag + ": T2(c) > 0", *ac.T2 > 0.0, *ac.T2 / sc);
    const double qb = eval_aux(traj.eval(ph->b->r), field).Q;
    const double qbb = eval_aux(traj.eval(ph->b_bar->r), field).Q;
    const double qs = std::max({std::fabs(qb), std::fabs(qbb), 1e-300});
    L.claim(tag + ": Q(b_bar) > Q(b)", qbb > qb, (qbb - qb) / qs);
    const auto grid = detail::radii_in(traj, ph->c_prev, ph->b->r, ph->c_prev > traj.r_begin(), true);
    L.sign(tag + ": T2 > 0 on [c_prev, b]",
           detail::positivity(traj, grid, [&](const State& s) { return eval_aux(s, field).T2; }));
    double qmin = HUGE_VAL;
    for (double r : detail::radii_in(traj, ph->b->r, ph->b_bar->r)) {
      qmin = std::min(qmin, eval_aux(traj.eval(r), field).Q);
    }
    L.note(tag + ": min Q on (b, b_bar) = " + detail::fmt(qmin) + " (recorded only)");
  }
  if (audited == 0) {
    return detail::skipped("renewability", case_id, truncated ? "all phases truncated" : "no resolved phase");
  }
  if (truncated) L.note(std::to_string(truncated) + " truncated phase(s) skipped");
  return L.record("renewability", case_id);
}

namespace detail {

inline CheckRecord run_one(const std::string& check, const CaseData& cd, const VerificationPlan& plan) {
  const std::string id = cd.vc.id();
  const FieldParams fp = cd.vc.field;
  const Trajectory& t = cd.view;
  const PhasePortrait& pt = cd.portrait;
  const CriticalAmplitudes ca = critical_amplitudes(fp);
  auto aux = [&](const State& s) { return eval_aux(s, fp); };
  Ledger L;

  if (cd.constant && check != "cross_tolerance") {
    L.note("constant solution");
    return L.record(check, id);
  }

  if (check == "cross_tolerance") {
    const IntegratorControls tight = plan.controls.tightened(10.0);
    if (cd.bound) {
      const LadderEntry e2 = find_alpha_k(fp, cd.vc.ladder_index(), plan.bracket_tol, tight);
      const double allowed = 10.0 * std::max(plan.bracket_tol, plan.controls.rel_tol) * cd.alpha;
      const double diff = std::fabs(e2.midpoint() - cd.alpha);
      L.claim("alpha_k agrees across tolerances", diff <= allowed, (allowed - diff) / allowed);
      L.note("alpha_k = " + fmt(cd.alpha) + ", tightened diff = " + fmt(diff));
    } else {
      const Trajectory t2 = integrate({fp, cd.alpha, tight}, StopPolicy::verification());
      const PhasePortrait p2 = detect_events(t2);
      const int k2 = p2.node_count();
      L.claim("node count agrees across tolerances", k2 == cd.k, k2 == cd.k ? 1.0 : -1.0);
      for (int i = 0; i < std::min(cd.k, k2); ++i) {
        const double z = pt.zeros_u[static_cast<std::size_t>(i)].r;
        const double d = std::fabs(p2.zeros_u[static_cast<std::size_t>(i)].r - z);
        const double allowed = 10.0 * (plan.controls.abs_tol + plan.controls.rel_tol * std::max(1.0, z)) * 1e3;
        L.claim("z_" + std::to_string(i + 1) + " agrees", d <= allowed, (allowed - d) / allowed);
      }
    }
    return L.record(check, id);
  }

  if (check == "energy_monotone") {
    const auto& smp = t.samples();
    for (std::size_t j = 1; j < smp.size(); ++j) {
      const double e0 = energy(smp[j - 1].u, smp[j - 1].up, fp);
      const double e1 = energy(smp[j].u, smp[j].up, fp);
      const double allowed = 10.0 * (plan.controls.abs_tol + plan.controls.rel_tol * std::fabs(e0));
      ++L.probes;
      const double slack = (allowed - (e1 - e0)) / allowed;
      L.worst = std::min(L.worst, slack);
      if (e1 - e0 > allowed) {
        L.pass = false;
        if (L.notes.size() < 3) L.note("E increases at r=" + fmt(smp[j].r));
      }
    }
    return L.record(check, id);
  }

  if (check == "velocity_bound") {
    const double D = std::sqrt(2.0 * (big_F(cd.alpha, fp) + std::fabs(big_F(1.0, fp))));
    for (const auto& s : cd.full.samples()) {
      ++L.probes;
      const double m = (D - std::fabs(s.up)) / D;
      L.worst = std::min(L.worst, m);
      if (!(std::fabs(s.up) < D)) {
        L.pass = false;
        if (L.notes.size() < 3) L.note("|u'| >= D_alpha at r=" + fmt(s.r));
      }
    }
    L.note("D_alpha = " + fmt(D));
    return L.record(check, id);
  }

  const bool nodal_or_bound = cd.bound || cd.k > 0;
  const auto claim_radii = [&]() { return radii_in(t, t.r_begin(), cd.claim_end); };

  if (check == "positivity_energy") {
    if (!nodal_or_bound) return skipped(check, id, "not a ground, bound or nodal shot");
    const auto rs = claim_radii();
    L.sign("E > 0", positivity(t, rs, [&](const State& s) -> std::optional<double> { return aux(s).E; }));
    L.sign("P > 0", positivity(t, rs, [&](const State& s) -> std::optional<double> { return aux(s).P; }));
    L.sign("P1 > 0", positivity(t, rs, [&](const State& s) -> std::optional<double> { return aux(s).P1; }));
    L.sign("P2 > 0", positivity(t, rs, [&](const State& s) -> std::optional<double> { return aux(s).P2; }));
    return L.record(check, id);
  }

  if (check == "omega_monotone" || check == "pohozaev_decrease") {
    if (!nodal_or_bound) return skipped(check, id, "not a ground, bound or nodal shot");
    std::vector<double> cuts{t.r_begin()};
    for (const auto& z : pt.zeros_u) {
      if (z.r <= cd.claim_end) cuts.push_back(z.r);
    }
    if (cd.bound) cuts.push_back(cd.claim_end);
    const bool is_omega = check == "omega_monotone";
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const auto rs = radii_in(t, cuts[s], cuts[s + 1], false, false);
      std::optional<double> prev;
      for (double r : rs) {
        const State st = t.eval(r);
        std::optional<double> val;
        if (is_omega) {
          val = aux(st).omega;
        } else {
          val = aux(st).P / std::pow(r, fp.n);
        }
        if (!val) continue;
        if (prev) {
          const double d = is_omega ? *val - *prev : *prev - *val;
          const double sc = std::max({std::fabs(*val), std::fabs(*prev), 1e-300});
          ++L.probes;
          L.worst = std::min(L.worst, d / sc);
          if (d < -kSignSlack * sc) {
            L.pass = false;
            if (L.notes.size() < 3) L.note("monotonicity broken at r=" + fmt(r));
          }
        }
        prev = val;
      }
    }
    return L.record(check, id);
  }

  if (check == "first_phase_window") {
    if (!nodal_or_bound || cd.k == 0) return skipped(check, id, "needs at least one zero of u");
    const double z1 = pt.zeros_u.front().r;
    const auto r1 = radii_in(t, t.r_begin(), z1);
    L.sign("Q > 0 on (0, z1]", positivity(t, r1, [&](const State& s) -> std::optional<double> { return aux(s).Q; }));
    L.sign("M > 0 on (0, z1]", positivity(t, r1, [&](const State& s) -> std::optional<double> { return aux(s).M; }));
    L.sign("T1 > 0 on (0, z1)",
           positivity(t, radii_in(t, t.r_begin(), z1, true, false), [&](const State& s) { return aux(s).T1; }));
    const PhaseLabels* p1 = pt.phase(1);
    if (cd.covered >= 1 && p1 != nullptr && p1->c) {
      const double c1 = p1->c->r;
      const auto rc = radii_in(t, t.r_begin(), c1);
      L.sign("M > 0 on (0, c1]", positivity(t, rc, [&](const State& s) -> std::optional<double> { return aux(s).M; }));
      L.sign("Q1 > 0 on (0, c1]",
             positivity(t, rc, [&](const State& s) -> std::optional<double> { return aux(s).Q1; }));
      L.sign("Q2 > 0 on (0, c1]",
             positivity(t, rc, [&](const State& s) -> std::optional<double> { return aux(s).Q2; }));
      if (p1->b_bar) {
        L.sign("Q > 0 on [b_bar1, c1]", positivity(t, radii_in(t, p1->b_bar->r, c1),
                                                   [&](const State& s) -> std::optional<double> { return aux(s).Q; }));
      }
    } else {
      L.note("c1 outside the claim range; (0, z1] part only");
    }
    return L.record(check, id);
  }

  if (check == "phase_windows") {
    if (!nodal_or_bound) return skipped(check, id, "not a bound or nodal shot");
    for (int i = 2; i <= cd.covered; ++i) {
      const PhaseLabels* ph = pt.phase(i);
      if (ph == nullptr || !ph->c || !ph->b || !ph->b_bar) {
        L.note("phase " + std::to_string(i) + " truncated");
        continue;
      }
      const std::string tag = "phase " + std::to_string(i) + ": ";
      auto q = [&](const State& s) -> std::optional<double> { return aux(s).Q; };
      L.sign(tag + "Q > 0 on [c_prev, b]", positivity(t, radii_in(t, ph->c_prev, ph->b->r), q));
      L.sign(tag + "Q > 0 on [b_bar, c]", positivity(t, radii_in(t, ph->b_bar->r, ph->c->r), q));
      const double qb = aux(t.eval(ph->b->r)).Q;
      const double qbb = aux(t.eval(ph->b_bar->r)).Q;
      L.claim(tag + "Q(b_bar) > Q(b)", qbb > qb, (qbb - qb) / std::max({std::fabs(qb), std::fabs(qbb), 1e-300}));
      const auto rc = radii_in(t, ph->c_prev, ph->c->r);
      L.sign(tag + "M > 0", positivity(t, rc, [&](const State& s) -> std::optional<double> { return aux(s).M; }));
      L.sign(tag + "Q1 > 0", positivity(t, rc, [&](const State& s) -> std::optional<double> { return aux(s).Q1; }));
      L.sign(tag + "Q2 > 0", positivity(t, rc, [&](const State& s) -> std::optional<double> { return aux(s).Q2; }));
    }
    return L.record(check, id);
  }

  if (check == "renewability") {
    if (!nodal_or_bound) return skipped(check, id, "not a bound or nodal shot");
    return renewability_audit(t, pt, fp, cd.covered, id);
  }

  if (check == "tango" || check == "tau_localization") {
    if (!nodal_or_bound) return skipped(check, id, "needs zeros of u or a bound-state bracket");
    const auto& Z = pt.zeros_u;
    const double zk = cd.k > 0 ? Z.back().r : t.r_begin();
    std::vector<Event> taus;
    for (const auto& e : pt.zeros_v) {
      if (e.r <= zk) taus.push_back(e);
    }
    if (check == "tango") {
      L.claim("v has k zeros on [0, z_k]: found " + std::to_string(taus.size()),
              static_cast<int>(taus.size()) == cd.k, static_cast<int>(taus.size()) == cd.k ? 1.0 : -1.0);
      for (std::size_t i = 0; i < taus.size() && i < Z.size(); ++i) {
        const double lo = i == 0 ? 0.0 : Z[i - 1].r;
        const bool in = taus[i].r > lo && taus[i].r < Z[i].r;
        L.claim("tau_" + std::to_string(i + 1) + " in (z_" + std::to_string(i) + ", z_" + std::to_string(i + 1) + ")",
                in, in ? 1.0 : -1.0);
      }
      double vmax = 0.0;
      for (const auto& s : t.samples()) vmax = std::max(vmax, std::fabs(s.v));
      for (std::size_t i = 0; i < Z.size(); ++i) {
        const double vz = std::fabs(t.eval(Z[i].r).v);
        L.claim("v(z_" + std::to_string(i + 1) + ") != 0", vz > 1e-12 * vmax, vz / std::max(vmax, 1e-300));
      }
      std::vector<Event> all = taus;
      if (cd.bound) {
        const PhaseLabels* last = cd.k > 0 ? pt.phase(cd.k) : nullptr;
        const double ck = cd.k > 0 ? (last && last->c ? last->c->r : HUGE_VAL) : 0.0;
        int extra = 0;
        for (const auto& e : pt.zeros_v) {
          if (e.r > zk) {
            ++extra;
            all.push_back(e);
            L.claim("tau_k+1 > c_k", e.r > ck, e.r - ck);
          }
        }
        L.claim("one zero of v beyond z_k: found " + std::to_string(extra), extra == 1, extra == 1 ? 1.0 : -1.0);
      }
      for (const auto& e : all) {
        const State s = t.eval(e.r);
        const double prod = s.up * s.vp;
        L.claim("u'v' > 0 at tau=" + fmt(e.r), prod > 0.0, prod > 0.0 ? 1.0 : -1.0);
      }
    } else {
      std::vector<Event> all = taus;
      if (cd.bound) {
        for (const auto& e : pt.zeros_v) {
          if (e.r > zk) all.push_back(e);
        }
      }
      for (std::size_t i = 0; i < all.size(); ++i) {
        const PhaseLabels* ph = pt.phase(static_cast<int>(i) + 1);
        if (ph == nullptr || !ph->r) {
          L.note("phase " + std::to_string(i + 1) + " has no r label");
          continue;
        }
        const bool in = all[i].r > ph->c_prev && all[i].r < ph->r->r;
        L.claim("tau_" + std::to_string(i + 1) + " in (c_prev, r)", in,
                std::min(all[i].r - ph->c_prev, ph->r->r - all[i].r));
      }
    }
    return L.record(check, id);
  }

  if (check == "v_divergence") {
    if (cd.vc.family != CaseFamily::BoundBracket) return skipped(check, id, "BoundBracket cases only");
    const PhaseLabels* last = cd.k > 0 ? pt.phase(cd.k) : nullptr;
    const double ck = cd.k > 0 ? (last && last->c ? last->c->r : t.r_end()) : 0.0;
    const auto tau = first_v_zero_after(pt, ck);
    if (!tau || *tau + 1.0 >= t.r_end()) {
      L.claim("tau_k+1 + 1 inside the resolved range", false, -1.0);
      return L.record(check, id);
    }
    const double v1 = std::fabs(t.eval(*tau + 1.0).v);
    const double vend = std::fabs(t.eval(t.r_end()).v);
    const double ratio = vend / std::max(v1, 1e-300);
    L.claim("|v(r_trunc)| > 1e3 |v(tau_k+1 + 1)|", ratio > 1e3, ratio / 1e3 - 1.0);
    L.note("ratio = " + fmt(ratio));
    return L.record(check, id);
  }

  if (check == "unique_inflection") {
    if (!nodal_or_bound) return skipped(check, id, "needs a nodal shot or ground-state bracket");
    const InflectionReport ir = unique_inflection_check(t, pt);
    for (const auto& iv : ir.intervals) {
      if (iv.hi > cd.claim_end + 1e-12) continue;
      L.claim("one inflection in (" + fmt(iv.lo) + ", " + fmt(iv.hi) + "): found " + std::to_string(iv.count),
              iv.count == 1, iv.count == 1 ? 1.0 : -1.0);
    }
    return L.record(check, id);
  }

  if (check == "critical_amplitude_decrease") {
    if (!nodal_or_bound) return skipped(check, id, "needs a nodal shot or bracket");
    double prev = cd.alpha;
    for (int i = 1; i <= cd.covered; ++i) {
      const PhaseLabels* ph = pt.phase(i);
      if (ph == nullptr || !ph->c) break;
      const double a = std::fabs(ph->c->u);
      L.claim("|u(c_" + std::to_string(i) + ")| < |u(c_" + std::to_string(i - 1) + ")|", a < prev, (prev - a) / prev);
      L.claim("|u(c_" + std::to_string(i) + ")| > alpha_*", a > ca.alpha_star, (a - ca.alpha_star) / ca.alpha_star);
      prev = a;
    }
    return L.record(check, id);
  }

  if (check == "tail_dichotomy") {
    if (cd.bound) return skipped(check, id, "bound-state brackets decay instead");
    const auto& fpt = cd.full_portrait;
    if (!fpt.energy_nonpositive_radius) return skipped(check, id, "no E <= 0 witnessed");
    const double rb = *fpt.energy_nonpositive_radius;
    const double sgn = cd.full.eval(rb).u >= 0.0 ? 1.0 : -1.0;
    std::vector<double> above;
    std::vector<double> below;
    for (const auto& c : fpt.crits_u) {
      if (c.r <= rb) continue;
      const double w = sgn * c.u;
      L.claim("u(c~) in (0, alpha_*)", w > 0.0 && w < ca.alpha_star, std::min(w, ca.alpha_star - w));
      (w > 1.0 ? above : below).push_back(w);
    }
    for (std::size_t j = 1; j < above.size(); ++j) {
      L.claim("maxima decrease toward 1", above[j] < above[j - 1], above[j - 1] - above[j]);
    }
    for (std::size_t j = 1; j < below.size(); ++j) {
      L.claim("minima increase toward 1", below[j] > below[j - 1], below[j] - below[j - 1]);
    }
    const long diff = static_cast<long>(above.size()) - static_cast<long>(below.size());
    L.claim("maxima and minima alternate", std::labs(diff) <= 1, std::labs(diff) <= 1 ? 1.0 : -1.0);
    return L.record(check, id);
  }

  if (check == "reflection_inequality") {
    if (!nodal_or_bound) return skipped(check, id, "needs a nodal shot or bracket");
    for (int i = 1; i <= cd.covered; ++i) {
      const ReflectionReport rr = reflection_inequality(t, pt, i);
      if (!rr.applicable) continue;
      for (const auto& pnt : rr.points) {
        const double sc = std::max({std::fabs(pnt.phi_left), std::fabs(pnt.phi_right), 1e-300});
        L.claim("phase " + std::to_string(i) + " mu=" + fmt(pnt.mu), pnt.phi_right > pnt.phi_left,
                (pnt.phi_right - pnt.phi_left) / sc);
      }
    }
    return L.record(check, id);
  }

  if (check == "bridge_integral") {
    if (!(fp.n == 3 && fp.p < 2.0)) return skipped(check, id, "stated for n = 3 and 1 < p < 2 only");
    if (!nodal_or_bound) return skipped(check, id, "needs a nodal shot or bracket");
    for (int i = 1; i <= std::max(cd.covered, cd.bound ? 1 : 0); ++i) {
      const PhaseLabels* ph = pt.phase(i);
      if (ph == nullptr || !ph->b) continue;
      const double ut = std::fabs(ph->b->u);
      const BridgeIntegral bi = bridge_integral_I(t, pt, i, ut);
      if (bi.reversed) {
        L.note("I_" + std::to_string(i) + ": tau < b, empty range (oriented integral " + fmt(bi.oriented) + ")");
        continue;
      }
      if (bi.empty_range) {
        L.note("I_" + std::to_string(i) + ": tau = b, empty range");
        continue;
      }
      L.claim("I_" + std::to_string(i) + " > 0", bi.value > 0.0, bi.value);
      L.note("I_" + std::to_string(i) + " = " + fmt(bi.value));
      if (bi.singular_warning) L.note("u' vanishes inside (b, tau)");
    }
    if (L.probes == 0) {
      CheckRecord rec = L.record(check, id);
      rec.status = CheckStatus::SkippedUndefined;
      return rec;
    }
    return L.record(check, id);
  }

  if (check == "identity_residuals" || check == "connection_identity") {
    // Cancellation inside the identities amplifies integration error by up
    // to ~1e4 near r = 0 for large alpha, so residuals use a finer shot.
    Trajectory fine = integrate({fp, cd.alpha, plan.controls.tightened(100.0)}, StopPolicy::verification());
    if (cd.r_trunc) fine = fine.truncated(*cd.r_trunc);
    const auto probes = probe_radii(fine, plan.probes);
    const ResidualReport rep = identity_residuals(fine, fp, probes);
    if (check == "identity_residuals") {
      for (const auto& ir : rep.identities) {
        L.probes = std::max(L.probes, ir.probes);
        L.worst = std::min(L.worst, 1e-6 - ir.max_residual);
        if (!(ir.max_residual < 1e-6)) {
          L.pass = false;
          L.note(ir.id + " residual " + fmt(ir.max_residual) + " at r=" + fmt(ir.worst_r));
        }
      }
      L.note("max residual " + fmt(rep.worst()));
    } else {
      L.probes = rep.connection_probes;
      L.claim("pointwise relative residual < 1e-9", rep.connection_max < 1e-9, 1e-9 - rep.connection_max);
      L.note("max residual " + fmt(rep.connection_max));
    }
    return L.record(check, id);
  }

  if (check == "tail_asymptotics") {
    if (!cd.bound) return skipped(check, id, "bound-state brackets only");
    std::optional<double> last;
    for (double r : radii_in(t, t.r_begin(), t.r_end())) {
      const double a = std::fabs(t.eval(r).u);
      if (a > 1e-5 && a < 1e-3) last = r;
    }
    if (!last) {
      L.claim("a radius with |u| in (1e-5, 1e-3)", false, -1.0);
      return L.record(check, id);
    }
    const State s = t.eval(*last);
    const double gap = std::fabs(s.up / s.u + 1.0);
    L.claim("|u'/u + 1| < 0.05 at r=" + fmt(*last), gap < 0.05, 0.05 - gap);
    L.note("|u'/u + 1 + (n-1)/(2r)| = " + fmt(corrected_slope_gap(s, fp)));
    return L.record(check, id);
  }

  if (check == "ladder_jump") {
    if (!cd.bound) return skipped(check, id, "bound-state brackets only");
    const int k = cd.vc.ladder_index();
    const double eps = 1e-4 * cd.alpha;
    const NodeCount up = node_count_of_alpha(fp, cd.bracket->alpha_hi + eps, plan.controls);
    L.claim("N(alpha_hi + eps) = k+1: got " + std::to_string(up.count), up.count == k + 1 && up.status == CountStatus::Final,
            up.count == k + 1 ? 1.0 : -1.0);
    const SolutionClass lo = classify({fp, cd.bracket->alpha_lo - eps, plan.controls});
    const bool ok = lo.tag == ClassTag::Oscillatory && lo.node_count == k;
    L.claim(std::string("class(alpha_lo - eps) = Oscillatory(k): got ") + to_string(lo.tag) + "(" +
                std::to_string(lo.node_count) + ")",
            ok, ok ? 1.0 : -1.0);
    return L.record(check, id);
  }

  throw ParameterError("unknown check id: " + check);
}

}  // namespace detail

inline std::vector<CheckRecord> run_case(const VerificationCase& vc, const VerificationPlan& plan) {
  std::vector<CheckRecord> out;
  CaseData cd;
  try {
    cd = prepare_case(vc, plan);
  } catch (const Error& e) {
    for (const auto& c : plan.checks) {
      CheckRecord rec;
      rec.check = c;
      rec.case_id = vc.id();
      rec.status = CheckStatus::Fail;
      rec.notes = std::string("case setup failed: ") + e.what();
      out.push_back(rec);
    }
    return out;
  }
  std::string derived_note;
  for (const auto& c : plan.checks) {
    CheckRecord rec;
    try {
      rec = detail::run_one(c, cd, plan);
    } catch (const Error& e) {
      rec.check = c;
      rec.case_id = vc.id();
      rec.status = CheckStatus::Fail;
      rec.notes = std::string("error: ") + e.what();
    }
    if (c == "cross_tolerance" && rec.status == CheckStatus::Fail) {
      derived_note = "derived quantities disagree across tolerances";
    } else if (!derived_note.empty()) {
      rec.notes += (rec.notes.empty() ? "" : "; ") + derived_note;
    }
    out.push_back(rec);
  }
  return out;
}

// Cases run concurrently; records are merged in plan order.
inline VerificationReport run_checks(VerificationPlan plan) {
  plan.validate();
  auto order = plan.checks;
  // Cross-tolerance agreement runs before the checks that consume its data.
  auto it = std::find(order.begin(), order.end(), "cross_tolerance");
  if (it != order.end()) std::rotate(order.begin(), it, it + 1);
  plan.checks = order;
  std::vector<std::future<std::vector<CheckRecord>>> jobs;
  for (const auto& vc : plan.cases) {
    jobs.push_back(std::async(std::launch::async, [&plan, vc] { return run_case(vc, plan); }));
  }
  VerificationReport rep;
  for (auto& j : jobs) {
    auto recs = j.get();
    rep.records.insert(rep.records.end(), recs.begin(), recs.end());
  }
  return rep;
}

// Named plans. "core": ground and bound brackets plus oscillatory shots on
// both sides of alpha_0. "residual": brackets only, for the n = 3, 1 < p < 2
// regime where the bridge integral applies.
inline VerificationPlan preset_plan(const std::string& name, const FieldParams& field,
                                    const IntegratorControls& controls = {}) {
  field.validate();
  VerificationPlan plan;
  plan.controls = controls;
  plan.checks = all_check_ids();
  if (name == "core") {
    plan.cases = {{field, CaseFamily::GroundBracket, 0, 0.0},
                  {field, CaseFamily::BoundBracket, 1, 0.0},
                  {field, CaseFamily::BoundBracket, 2, 0.0},
                  {field, CaseFamily::BoundBracket, 3, 0.0},
                  {field, CaseFamily::Oscillatory, 0, 0.5},
                  {field, CaseFamily::Explicit, 0, 1.0}};
    const LadderEntry e1 = find_alpha_k(field, 1, 1e-6, controls);
    const LadderEntry e2 = find_alpha_k(field, 2, 1e-6, controls);
    plan.cases.push_back({field, CaseFamily::Oscillatory, 0, 0.5 * (e1.alpha_hi + e2.alpha_lo)});
  } else if (name == "residual") {
    plan.cases = {{field, CaseFamily::GroundBracket, 0, 0.0},
                  {field, CaseFamily::BoundBracket, 1, 0.0},
                  {field, CaseFamily::BoundBracket, 2, 0.0}};
  } else {
    throw ParameterError("unknown preset: " + name + " (expected core or residual)");
  }
  return plan;
}

}  // namespace boundstate
