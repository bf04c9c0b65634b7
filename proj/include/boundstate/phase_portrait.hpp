#pragma once

// Event structure of a trajectory: zeros and critical points of u, zeros of
// v, inflection points, and the per-phase labels where |u| crosses alpha_*
// and 1.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boundstate/errors.hpp"
#include "boundstate/integrator.hpp"
#include "boundstate/roots.hpp"
#include "boundstate/scalar_field.hpp"

namespace boundstate {

enum class PhaseKind { SemiTail, TailOscillatory };

inline const char* to_string(PhaseKind k) {
  return k == PhaseKind::SemiTail ? "SemiTail" : "TailOscillatory";
}

enum class EventTarget { ZeroU, ZeroUp, ZeroV, ZeroUpp, AbsUAlphaStar, AbsUOne };

inline const char* to_string(EventTarget t) {
  switch (t) {
    case EventTarget::ZeroU: return "zero_u";
    case EventTarget::ZeroUp: return "zero_up";
    case EventTarget::ZeroV: return "zero_v";
    case EventTarget::ZeroUpp: return "zero_upp";
    case EventTarget::AbsUAlphaStar: return "abs_u_alpha_star";
    case EventTarget::AbsUOne: return "abs_u_one";
  }
  return "?";
}

struct EventLocator {
  double r_lo = 0.0;
  double r_hi = 0.0;
  EventTarget target = EventTarget::ZeroU;
  double root = 0.0;
  double residual = 0.0;
};

struct Event {
  double r = 0.0;
  double u = 0.0;
  bool uncertain = false;

  friend bool operator==(const Event&, const Event&) = default;
};

// Phase i is (c_{i-1}, c_i]. Labels satisfy
//   c_{i-1} < b < r < z < r_bar < b_bar < c_i
// with |u(b)| = |u(b_bar)| = alpha_* and |u(r)| = |u(r_bar)| = 1.
// An open phase has no zero of u: the ground-like descent from the origin or
// the semi-tail after the last critical point of a decaying shot.
struct PhaseLabels {
  int index = 0;
  double c_prev = 0.0;
  std::optional<Event> b;
  std::optional<Event> r;
  std::optional<Event> z;
  std::optional<Event> r_bar;
  std::optional<Event> b_bar;
  std::optional<Event> c;
  bool open = false;
  bool truncated = false;

  friend bool operator==(const PhaseLabels&, const PhaseLabels&) = default;
};

struct PhasePortrait {
  std::vector<Event> zeros_u;
  std::vector<Event> crits_u;  // c_0 = 0 is implicit, never stored
  std::vector<Event> zeros_v;
  std::vector<Event> inflections_u;
  std::vector<PhaseLabels> phases;
  PhaseKind phase_kind = PhaseKind::SemiTail;
  std::optional<double> energy_nonpositive_radius;

  [[nodiscard]] int node_count() const { return static_cast<int>(zeros_u.size()); }

  // Phase with a zero of u and index i (1-based), if present.
  [[nodiscard]] const PhaseLabels* phase(int i) const {
    for (const auto& ph : phases) {
      if (ph.index == i) {
        return &ph;
      }
    }
    return nullptr;
  }

  friend bool operator==(const PhasePortrait&, const PhasePortrait&) = default;
};

inline constexpr double kLocatorRelTol = 1e-12;
inline constexpr double kTangencyTol = 1e-8;

inline double locator_tol(double r) { return kLocatorRelTol * std::max(1.0, std::fabs(r)); }

inline double event_value(EventTarget t, const State& s, const FieldParams& fp, double alpha_star) {
  switch (t) {
    case EventTarget::ZeroU: return s.u;
    case EventTarget::ZeroUp: return s.up;
    case EventTarget::ZeroV: return s.v;
    case EventTarget::ZeroUpp: return u_second(s, fp);
    case EventTarget::AbsUAlphaStar: return std::fabs(s.u) - alpha_star;
    case EventTarget::AbsUOne: return std::fabs(s.u) - 1.0;
  }
  return 0.0;
}

// Scan radii: every sample plus `sub - 1` interior points per step.
inline std::vector<double> scan_grid(const Trajectory& traj, double lo, double hi, int sub = 4) {
  std::vector<double> grid;
  const auto& smp = traj.samples();
  lo = std::max(lo, traj.r_begin());
  hi = std::min(hi, traj.r_end());
  if (!(hi > lo)) {
    return grid;
  }
  grid.push_back(lo);
  for (std::size_t i = 0; i + 1 < smp.size(); ++i) {
    const double a = smp[i].r;
    const double b = smp[i + 1].r;
    if (b <= lo || a >= hi) {
      continue;
    }
    for (int j = 1; j <= sub; ++j) {
      const double x = a + (b - a) * static_cast<double>(j) / sub;
      if (x > lo && x < hi) {
        grid.push_back(x);
      }
    }
  }
  grid.push_back(hi);
  return grid;
}

// Every strict sign change of g(state) on (lo, hi), refined on dense output.
template <typename G>
std::vector<EventLocator> locate_roots(const Trajectory& traj, G&& g, EventTarget target, double lo,
                                       double hi) {
  std::vector<EventLocator> out;
  const std::vector<double> grid = scan_grid(traj, lo, hi);
  if (grid.size() < 2) {
    return out;
  }
  auto value = [&](double r) { return g(traj.eval(r)); };
  double last_r = 0.0;
  double last_g = 0.0;
  bool have_last = false;
  for (double r : grid) {
    const double gv = value(r);
    if (gv == 0.0) {
      continue;
    }
    if (have_last && (gv < 0.0) != (last_g < 0.0)) {
      const double tol = locator_tol(r);
      const RootResult rr = refine_root(value, last_r, r, last_g, gv, tol);
      out.push_back({last_r, r, target, rr.root, rr.residual});
    }
    last_r = r;
    last_g = gv;
    have_last = true;
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].root - out[i - 1].root < 2.0 * locator_tol(out[i].root)) {
      std::ostringstream oss;
      oss.precision(17);
      oss << "two " << to_string(target) << " events within locator tolerance near r = " << out[i].root;
      throw AmbiguousEvent(oss.str());
    }
  }
  return out;
}

inline std::vector<EventLocator> locate_events(const Trajectory& traj, EventTarget target, double lo,
                                               double hi) {
  const FieldParams fp = traj.field();
  const double astar = critical_amplitudes(fp).alpha_star;
  return locate_roots(traj, [&](const State& s) { return event_value(target, s, fp, astar); }, target, lo,
                      hi);
}

namespace detail {

inline std::vector<Event> to_events(const Trajectory& traj, const std::vector<EventLocator>& locs) {
  std::vector<Event> ev;
  ev.reserve(locs.size());
  for (const auto& l : locs) {
    ev.push_back({l.root, traj.eval(l.root).u, false});
  }
  return ev;
}

inline std::vector<Event> between(const std::vector<Event>& ev, double lo, double hi) {
  std::vector<Event> out;
  for (const auto& e : ev) {
    if (e.r > lo && e.r < hi) {
      out.push_back(e);
    }
  }
  return out;
}

[[noreturn]] inline void interlacing_fail(const std::string& what, double r) {
  std::ostringstream oss;
  oss.precision(17);
  oss << what << " near r = " << r;
  throw InterlacingViolation(oss.str());
}

inline std::optional<Event> unique_in(const std::vector<Event>& ev, double lo, double hi, const char* label,
                                      bool first_only) {
  const auto in = between(ev, lo, hi);
  if (in.empty()) {
    return std::nullopt;
  }
  if (in.size() > 1 && !first_only) {
    interlacing_fail(std::string("label ") + label + " is not unique within its phase", in[1].r);
  }
  return in.front();
}

}  // namespace detail

inline PhasePortrait detect_events(const Trajectory& traj, const CriticalAmplitudes& amps) {
  const FieldParams fp = traj.field();
  const double lo = traj.r_begin();
  const double hi = traj.r_end();
  auto scan = [&](EventTarget t) {
    return detail::to_events(
        traj, locate_roots(traj, [&](const State& s) { return event_value(t, s, fp, amps.alpha_star); }, t,
                           lo, hi));
  };

  PhasePortrait pp;
  pp.zeros_u = scan(EventTarget::ZeroU);
  pp.crits_u = scan(EventTarget::ZeroUp);
  pp.zeros_v = scan(EventTarget::ZeroV);
  pp.inflections_u = scan(EventTarget::ZeroUpp);
  const auto b_cross = scan(EventTarget::AbsUAlphaStar);
  const auto r_cross = scan(EventTarget::AbsUOne);

  for (const auto& s : traj.samples()) {
    if (energy(s.u, s.up, fp) <= 0.0) {
      pp.energy_nonpositive_radius = s.r;
      break;
    }
  }
  pp.phase_kind = pp.energy_nonpositive_radius || traj.termination().tag == Termination::EnergyNonpositive
                      ? PhaseKind::TailOscillatory
                      : PhaseKind::SemiTail;

  const auto& Z = pp.zeros_u;
  const auto& C = pp.crits_u;
  const int k = static_cast<int>(Z.size());

  auto near = [](double x, double level) { return std::fabs(std::fabs(x) - level) < kTangencyTol; };

  auto fill_labels = [&](PhaseLabels& ph, double from, double to_before_zero, double after_zero,
                         double end) {
    ph.b = detail::unique_in(b_cross, from, to_before_zero, "b", false);
    ph.r = detail::unique_in(r_cross, from, to_before_zero, "r", false);
    if (ph.z) {
      ph.r_bar = detail::unique_in(r_cross, after_zero, end, "r_bar", false);
      ph.b_bar = detail::unique_in(b_cross, after_zero, end, "b_bar", false);
    }
  };

  double c_prev = 0.0;
  std::optional<Event> c_prev_event;
  for (int i = 1; i <= k; ++i) {
    const Event& z = Z[static_cast<std::size_t>(i - 1)];
    if (i == 1) {
      const auto early = detail::between(C, 0.0, z.r);
      if (!early.empty()) {
        detail::interlacing_fail("critical point of u before its first zero", early.front().r);
      }
    }
    PhaseLabels ph;
    ph.index = i;
    ph.c_prev = c_prev;
    ph.z = z;
    double end = hi;
    if (i < k) {
      const auto cs = detail::between(C, z.r, Z[static_cast<std::size_t>(i)].r);
      if (cs.size() != 1) {
        detail::interlacing_fail("expected exactly one critical point between consecutive zeros", z.r);
      }
      ph.c = cs.front();
      end = cs.front().r;
      if (!(std::fabs(cs.front().u) > amps.alpha_star)) {
        detail::interlacing_fail("|u(c_i)| <= alpha_* at an interior critical point", cs.front().r);
      }
    } else {
      const auto cs = detail::between(C, z.r, hi);
      if (!cs.empty()) {
        ph.c = cs.front();
        end = cs.front().r;
      } else {
        ph.truncated = true;
      }
    }
    fill_labels(ph, c_prev, z.r, z.r, end);
    if (c_prev_event) {
      if (near(c_prev_event->u, amps.alpha_star) && ph.b) ph.b->uncertain = true;
      if (near(c_prev_event->u, 1.0) && ph.r) ph.r->uncertain = true;
    }
    if (ph.c) {
      if (near(ph.c->u, amps.alpha_star) && ph.b_bar) ph.b_bar->uncertain = true;
      if (near(ph.c->u, 1.0) && ph.r_bar) ph.r_bar->uncertain = true;
    }
    // Ordering within the phase.
    std::vector<std::pair<const char*, double>> seq{{"c_prev", c_prev}};
    if (ph.b) seq.emplace_back("b", ph.b->r);
    if (ph.r) seq.emplace_back("r", ph.r->r);
    seq.emplace_back("z", z.r);
    if (ph.r_bar) seq.emplace_back("r_bar", ph.r_bar->r);
    if (ph.b_bar) seq.emplace_back("b_bar", ph.b_bar->r);
    if (ph.c) seq.emplace_back("c", ph.c->r);
    for (std::size_t j = 1; j < seq.size(); ++j) {
      if (!(seq[j].second > seq[j - 1].second)) {
        detail::interlacing_fail(std::string("label order broken: ") + seq[j - 1].first + " !< " + seq[j].first,
                                 seq[j].second);
      }
    }
    if (ph.b && ph.r && ph.b->r > ph.r->r) {
      detail::interlacing_fail("b after r", ph.b->r);
    }
    pp.phases.push_back(ph);
    if (!ph.c) {
      break;
    }
    c_prev = ph.c->r;
    c_prev_event = ph.c;
  }

  // Open phase: ground-like descent (k = 0, alpha > 1) or the semi-tail of a
  // decaying shot after its last critical point.
  const bool ground_like = k == 0 && traj.alpha() > 1.0;
  const bool semi_tail = k > 0 && pp.phase_kind == PhaseKind::SemiTail && !pp.phases.empty() &&
                         pp.phases.back().c.has_value();
  if (ground_like || semi_tail) {
    PhaseLabels ph;
    ph.index = k + 1;
    ph.c_prev = ground_like ? 0.0 : pp.phases.back().c->r;
    ph.open = true;
    const auto next = detail::between(C, ph.c_prev, hi);
    double end = hi;
    if (!next.empty()) {
      ph.c = next.front();
      end = next.front().r;
    } else {
      ph.truncated = true;
    }
    ph.b = detail::unique_in(b_cross, ph.c_prev, end, "b", true);
    ph.r = detail::unique_in(r_cross, ph.c_prev, end, "r", true);
    if (c_prev_event && semi_tail) {
      if (near(c_prev_event->u, amps.alpha_star) && ph.b) ph.b->uncertain = true;
      if (near(c_prev_event->u, 1.0) && ph.r) ph.r->uncertain = true;
    }
    pp.phases.push_back(ph);
  }
  return pp;
}

inline PhasePortrait detect_events(const Trajectory& traj) {
  return detect_events(traj, critical_amplitudes(traj.field()));
}

// Strict sign changes of u. Final when the run stopped on E <= 0.
inline int count_nodes(const Trajectory& traj) {
  if (traj.termination().failed()) {
    throw IndeterminateCount(std::string("integration ended with ") + to_string(traj.termination().tag) +
                             ": " + traj.termination().detail);
  }
  int count = 0;
  double last = 0.0;
  for (double r : scan_grid(traj, traj.r_begin(), traj.r_end())) {
    const double u = traj.eval(r).u;
    if (u == 0.0) {
      continue;
    }
    if (last != 0.0 && (u < 0.0) != (last < 0.0)) {
      ++count;
    }
    last = u;
  }
  return count;
}

struct InflectionInterval {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  std::vector<double> radii;
};

struct InflectionReport {
  bool pass = true;
  std::vector<InflectionInterval> intervals;
  std::string notes;
};

// u'' must change sign exactly once in each (c_{i-1}, z_i), and once in
// (0, r_1) for a ground-like descent.
inline InflectionReport unique_inflection_check(const Trajectory& traj, const PhasePortrait& portrait) {
  InflectionReport rep;
  auto tally = [&](double lo, double hi) {
    InflectionInterval iv{lo, hi, 0, {}};
    for (const auto& e : portrait.inflections_u) {
      if (e.r > lo && e.r < hi) {
        ++iv.count;
        iv.radii.push_back(e.r);
      }
    }
    if (iv.count != 1) {
      rep.pass = false;
    }
    rep.intervals.push_back(std::move(iv));
  };
  for (const auto& ph : portrait.phases) {
    if (ph.z) {
      tally(ph.c_prev, ph.z->r);
    } else if (ph.open && ph.index == 1 && ph.r) {
      tally(0.0, ph.r->r);
    }
  }
  if (rep.intervals.empty()) {
    rep.notes = "no phases: vacuous pass";
  }
  (void)traj;
  return rep;
}

}  // namespace boundstate
