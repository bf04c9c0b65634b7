#pragma once

// Auxiliary functionals of (u, v) along a trajectory, residuals of their
// derivative identities, and the integral and reflection diagnostics built on
// them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "boundstate/errors.hpp"
#include "boundstate/integrator.hpp"
#include "boundstate/phase_portrait.hpp"
#include "boundstate/quadrature.hpp"
#include "boundstate/scalar_field.hpp"

namespace boundstate {

struct AuxSample {
  double r = 0.0;
  double E = 0.0;
  double E_hat = 0.0;
  double P = 0.0;
  double P1 = 0.0;
  double P2 = 0.0;
  std::optional<double> omega;  // u = 0
  double rho = 0.0;
  double Q = 0.0;
  double Q1 = 0.0;
  double Q2 = 0.0;
  double Qn = 0.0;
  double M = 0.0;
  std::optional<double> T1;     // u = 0
  std::optional<double> T2;     // u = 0
  std::optional<double> B0;     // u' = 0
  std::optional<double> phi_n;  // u' = 0
  std::optional<double> varpi;  // u' = 0
};

struct ParametricSample {
  double r = 0.0;
  double a = 0.0;
  double W_a = 0.0;
  std::optional<double> B_a;  // u' = 0
  double F_a_of_u = 0.0;
};

inline AuxSample eval_aux(const State& s, const FieldParams& fp) {
  if (!(s.r > 0.0)) {
    throw DomainError("auxiliary functionals need r > 0");
  }
  const double n = fp.n;
  const double p = fp.p;
  const double r = s.r;
  const double u = s.u;
  const double up = s.up;
  const double v = s.v;
  const double vp = s.vp;
  const double rn1 = std::pow(r, n - 1.0);
  const double rn = rn1 * r;
  const double fu = f(u, fp);
  const double Fu = big_F(u, fp);
  const double fpu = f_prime(u, fp);

  AuxSample a;
  a.r = r;
  a.E = 0.5 * up * up + Fu;
  a.E_hat = rn1 * rn1 * a.E;
  const double tail = (n - 2.0) * rn1 * u * up;
  a.P = rn * (up * up + 2.0 * Fu) + tail;
  a.P1 = rn * (up * up + u * fu) + tail;
  a.P2 = rn * (up * up + (n - 2.0) / n * u * fu) + tail;
  a.rho = rn1 * (fpu * up * v - fu * vp);
  a.Q = rn * (up * vp + fu * v) + (n - 2.0) * rn1 * up * v;
  a.Q1 = a.Q + rn1 * up * v;
  a.Q2 = a.Q + 2.0 * rn1 * up * v;
  a.Qn = a.Q + n * rn1 * up * v;
  a.M = rn1 * (up * v - u * vp);
  if (u != 0.0) {
    a.omega = -r * up / u;
    a.T1 = a.Q - g1(u, fp) * a.M;
    a.T2 = a.Q - g2(u, fp) * a.M;
  }
  if (up != 0.0) {
    const double ratio = rn1 * v / up;
    a.B0 = a.Q - 2.0 * Fu * ratio;
    a.phi_n = a.Qn / (r * up * up);
    a.varpi = (p - 1.0) / (p + 1.0) * ratio * pow_abs(u, p + 1.0);
  }
  return a;
}

inline ParametricSample eval_parametric(const State& s, double a, const FieldParams& fp) {
  const AuxSample x = eval_aux(s, fp);
  ParametricSample ps;
  ps.r = s.r;
  ps.a = a;
  ps.W_a = x.Q - a * x.M;
  ps.F_a_of_u = big_F_a(s.u, a, fp);
  if (s.up != 0.0) {
    ps.B_a = ps.W_a - 2.0 * ps.F_a_of_u * std::pow(s.r, fp.n - 1.0) * s.v / s.up;
  }
  return ps;
}

// phi = Q / (r^{n-1} |u'|), compared at matched amplitudes across a zero.
inline std::optional<double> reflection_phi(const State& s, const FieldParams& fp) {
  if (s.up == 0.0) {
    return std::nullopt;
  }
  return eval_aux(s, fp).Q / (std::pow(s.r, fp.n - 1.0) * std::fabs(s.up));
}

// Connection between Q, P, M: Q - P v/u = omega (M - varpi). Returns the
// residual relative to |Q| + |P v/u|, or nothing where u or u' vanishes.
inline std::optional<double> connection_residual(const State& s, const FieldParams& fp) {
  if (s.u == 0.0 || s.up == 0.0) {
    return std::nullopt;
  }
  const AuxSample a = eval_aux(s, fp);
  const double pvu = a.P * s.v / s.u;
  const double lhs = a.Q - pvu;
  const double rhs = *a.omega * (a.M - *a.varpi);
  const double scale = std::fabs(a.Q) + std::fabs(pvu);
  if (scale == 0.0) {
    return std::fabs(lhs - rhs) == 0.0 ? 0.0 : 1.0;
  }
  return std::fabs(lhs - rhs) / scale;
}

enum class Singular { None, ZeroU, ZeroUp, Both };

// d/dr of `value` must equal `derivative`; either may be undefined at zeros
// of u or u' as declared by `singular`.
struct Identity {
  std::string id;
  Singular singular = Singular::None;
  std::function<std::optional<double>(const State&)> value;
  std::function<std::optional<double>(const State&)> derivative;
};

// The parametric identities are checked at a fixed a.
inline constexpr double kDefaultIdentityA = 1.0;

inline std::vector<Identity> identity_catalogue(const FieldParams& fp, double a = kDefaultIdentityA) {
  const CriticalAmplitudes ca = critical_amplitudes(fp);
  const double n = fp.n;
  const double p = fp.p;
  auto rpow = [](double r, double e) { return std::pow(r, e); };
  auto aux = [fp](const State& s) { return eval_aux(s, fp); };
  using O = std::optional<double>;
  std::vector<Identity> ids;

  ids.push_back({"energy", Singular::None, [aux](const State& s) -> O { return aux(s).E; },
                 [n](const State& s) -> O { return -(n - 1.0) * s.up * s.up / s.r; }});
  ids.push_back({"pohozaev", Singular::None, [aux](const State& s) -> O { return aux(s).P; },
                 [=](const State& s) -> O {
                   return rpow(s.r, n - 1.0) *
                          (2.0 * n * big_F(s.u, fp) - (n - 2.0) * s.u * f(s.u, fp));
                 }});
  ids.push_back({"pohozaev_closed", Singular::None, [aux](const State& s) -> O { return aux(s).P; },
                 [=](const State& s) -> O {
                   return 2.0 * rpow(s.r, n - 1.0) * s.u * s.u *
                          (pow_abs(s.u / ca.alpha_upper_star, p - 1.0) - 1.0);
                 }});
  ids.push_back({"pohozaev_p2", Singular::None, [aux](const State& s) -> O { return aux(s).P2; },
                 [=](const State& s) -> O {
                   return -4.0 / n * rpow(s.r, n) * s.u * s.up *
                          (pow_abs(ca.alpha_star * s.u / ca.alpha_upper_star, p - 1.0) - 1.0);
                 }});
  ids.push_back({"pohozaev_scaled", Singular::None,
                 [=](const State& s) -> O { return aux(s).P / rpow(s.r, n); },
                 [=](const State& s) -> O { return -n * aux(s).P2 / rpow(s.r, n + 1.0); }});
  ids.push_back({"omega", Singular::ZeroU, [aux](const State& s) -> O { return aux(s).omega; },
                 [=](const State& s) -> O {
                   if (s.u == 0.0) return std::nullopt;
                   return aux(s).P1 / (rpow(s.r, n - 1.0) * s.u * s.u);
                 }});
  ids.push_back({"rho", Singular::ZeroU, [aux](const State& s) -> O { return aux(s).rho; },
                 [=](const State& s) -> O {
                   if (s.u == 0.0) return std::nullopt;
                   return p * (p - 1.0) * rpow(s.r, n - 1.0) * s.u * pow_abs(s.u, p - 3.0) * s.up * s.up *
                          s.v;
                 }});
  ids.push_back({"q", Singular::None, [aux](const State& s) -> O { return aux(s).Q; },
                 [=](const State& s) -> O { return 2.0 * rpow(s.r, n - 1.0) * f(s.u, fp) * s.v; }});
  ids.push_back({"q1", Singular::None, [aux](const State& s) -> O { return aux(s).Q1; },
                 [=](const State& s) -> O {
                   return rpow(s.r, n - 1.0) * (s.up * s.vp + f(s.u, fp) * s.v);
                 }});
  ids.push_back({"q2", Singular::None, [aux](const State& s) -> O { return aux(s).Q2; },
                 [=](const State& s) -> O { return 2.0 * rpow(s.r, n - 1.0) * s.up * s.vp; }});
  ids.push_back({"qn", Singular::None, [aux](const State& s) -> O { return aux(s).Qn; },
                 [=](const State& s) -> O {
                   return rpow(s.r, n - 1.0) * (n * s.up * s.vp - (n - 2.0) * f(s.u, fp) * s.v);
                 }});
  ids.push_back({"m", Singular::None, [aux](const State& s) -> O { return aux(s).M; },
                 [=](const State& s) -> O {
                   return (p - 1.0) * rpow(s.r, n - 1.0) * s.u * pow_abs(s.u, p - 1.0) * s.v;
                 }});
  ids.push_back({"w_a", Singular::None,
                 [=](const State& s) -> O { return eval_parametric(s, a, fp).W_a; },
                 [=](const State& s) -> O {
                   return 2.0 * rpow(s.r, n - 1.0) * s.u * s.v * kappa_a(s.u, a, fp);
                 }});
  ids.push_back({"t1", Singular::ZeroU, [aux](const State& s) -> O { return aux(s).T1; },
                 [=](const State& s) -> O {
                   if (s.u == 0.0) return std::nullopt;
                   return -2.0 * s.u * s.up / pow_abs(s.u, p + 1.0) * aux(s).M;
                 }});
  ids.push_back({"t2", Singular::ZeroU, [aux](const State& s) -> O { return aux(s).T2; },
                 [=](const State& s) -> O {
                   if (s.u == 0.0) return std::nullopt;
                   return (p - 1.0) * rpow(s.r, n - 1.0) * s.u * s.v -
                          (p + 1.0) * s.u * s.up / pow_abs(s.u, p + 1.0) * aux(s).M;
                 }});
  ids.push_back({"t2_varpi", Singular::Both, [aux](const State& s) -> O { return aux(s).T2; },
                 [=](const State& s) -> O {
                   const AuxSample x = aux(s);
                   if (s.u == 0.0 || !x.varpi) return std::nullopt;
                   return -(p + 1.0) * s.u * s.up / pow_abs(s.u, p + 1.0) * (x.M - *x.varpi);
                 }});
  ids.push_back({"b0", Singular::ZeroUp, [aux](const State& s) -> O { return aux(s).B0; },
                 [=](const State& s) -> O {
                   const AuxSample x = aux(s);
                   if (!x.phi_n) return std::nullopt;
                   return -2.0 * big_F(s.u, fp) * *x.phi_n;
                 }});
  ids.push_back({"b_a", Singular::ZeroUp, [=](const State& s) -> O { return eval_parametric(s, a, fp).B_a; },
                 [=](const State& s) -> O {
                   const AuxSample x = aux(s);
                   if (!x.phi_n) return std::nullopt;
                   return -2.0 * big_F_a(s.u, a, fp) * *x.phi_n;
                 }});
  ids.push_back({"flux_u", Singular::None, [=](const State& s) -> O { return rpow(s.r, n - 1.0) * s.up; },
                 [=](const State& s) -> O { return -rpow(s.r, n - 1.0) * f(s.u, fp); }});
  ids.push_back({"flux_v", Singular::None, [=](const State& s) -> O { return rpow(s.r, n - 1.0) * s.vp; },
                 [=](const State& s) -> O { return -rpow(s.r, n - 1.0) * f_prime(s.u, fp) * s.v; }});
  ids.push_back({"uv_bracket", Singular::None,
                 [=](const State& s) -> O { return s.up * s.vp + f(s.u, fp) * s.v; },
                 [=](const State& s) -> O { return -2.0 * (n - 1.0) / s.r * s.up * s.vp; }});
  ids.push_back({"q_over_flux", Singular::ZeroUp,
                 [=](const State& s) -> O {
                   if (s.up == 0.0) return std::nullopt;
                   return aux(s).Q / (rpow(s.r, n - 1.0) * s.up);
                 },
                 [=](const State& s) -> O {
                   if (s.up == 0.0) return std::nullopt;
                   return f(s.u, fp) * aux(s).Q2 / (rpow(s.r, n - 1.0) * s.up * s.up);
                 }});
  ids.push_back({"e_hat", Singular::None, [aux](const State& s) -> O { return aux(s).E_hat; },
                 [=](const State& s) -> O {
                   return 2.0 * (n - 1.0) * rpow(s.r, 2.0 * n - 3.0) * big_F(s.u, fp);
                 }});
  ids.push_back({"v_over_up", Singular::ZeroUp,
                 [=](const State& s) -> O {
                   if (s.up == 0.0) return std::nullopt;
                   return rpow(s.r, n - 1.0) * s.v / s.up;
                 },
                 [aux](const State& s) -> O { return aux(s).phi_n; }});
  ids.push_back({"log_slope", Singular::ZeroU,
                 [](const State& s) -> O {
                   if (s.u == 0.0) return std::nullopt;
                   return -s.up / s.u;
                 },
                 [=](const State& s) -> O {
                   if (s.u == 0.0) return std::nullopt;
                   const double w = -s.up / s.u;
                   return w * w - (n - 1.0) / s.r * w - 1.0 + pow_abs(s.u, p - 1.0);
                 }});
  return ids;
}

inline double fd_step(double r) { return 1e-5 * std::max(1.0, r); }

// Radii of the events an identity of the given kind must keep away from.
struct SingularRadii {
  std::vector<double> zeros_u;
  std::vector<double> zeros_up;
};

inline SingularRadii singular_radii(const Trajectory& traj) {
  SingularRadii sr;
  for (const auto& l : locate_events(traj, EventTarget::ZeroU, traj.r_begin(), traj.r_end())) {
    sr.zeros_u.push_back(l.root);
  }
  for (const auto& l : locate_events(traj, EventTarget::ZeroUp, traj.r_begin(), traj.r_end())) {
    sr.zeros_up.push_back(l.root);
  }
  return sr;
}

// Probe radii: a golden-ratio sequence inside each interval between
// consecutive zeros of u and u', kept to the middle 80% of the interval.
inline std::vector<double> probe_radii(const Trajectory& traj, int count, double lo, double hi) {
  lo = std::max(lo, traj.r_begin() + 3.0 * fd_step(traj.r_begin()) + 1e-6);
  hi = std::min(hi, traj.r_end());
  std::vector<double> probes;
  if (!(hi > lo) || count <= 0) {
    return probes;
  }
  const SingularRadii sr = singular_radii(traj);
  std::vector<double> cuts{lo};
  for (double z : sr.zeros_u) {
    if (z > lo && z < hi) cuts.push_back(z);
  }
  for (double z : sr.zeros_up) {
    if (z > lo && z < hi) cuts.push_back(z);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const int segments = static_cast<int>(cuts.size()) - 1;
  const int per = std::max(2, (count + segments - 1) / segments);
  constexpr double kGolden = 0.6180339887498949;
  for (int s = 0; s < segments; ++s) {
    const double a = cuts[static_cast<std::size_t>(s)];
    const double b = cuts[static_cast<std::size_t>(s) + 1];
    if (!(b - a > 1e-9 * std::max(1.0, b))) {
      continue;
    }
    for (int j = 1; j <= per; ++j) {
      const double x = std::fmod(0.5 + j * kGolden, 1.0);
      const double r = a + (b - a) * (0.1 + 0.8 * x);
      if (r + 2.0 * fd_step(r) < traj.r_end()) {
        probes.push_back(r);
      }
    }
  }
  std::sort(probes.begin(), probes.end());
  return probes;
}

inline std::vector<double> probe_radii(const Trajectory& traj, int count = 64) {
  return probe_radii(traj, count, traj.r_begin(), traj.r_end());
}

struct IdentityResidual {
  std::string id;
  double max_residual = 0.0;
  double worst_r = 0.0;
  int probes = 0;
};

struct ResidualReport {
  std::vector<IdentityResidual> identities;
  double connection_max = 0.0;
  double connection_worst_r = 0.0;
  int connection_probes = 0;

  [[nodiscard]] double worst() const {
    double w = 0.0;
    for (const auto& i : identities) w = std::max(w, i.max_residual);
    return w;
  }
};

// Centered five-point difference of `value` at r with step h.
inline std::optional<double> centered_difference(const Trajectory& traj,
                                                 const std::function<std::optional<double>(const State&)>& value,
                                                 double r, double h) {
  const auto m2 = value(traj.eval(r - 2.0 * h));
  const auto m1 = value(traj.eval(r - h));
  const auto p1 = value(traj.eval(r + h));
  const auto p2 = value(traj.eval(r + 2.0 * h));
  if (!m2 || !m1 || !p1 || !p2) {
    return std::nullopt;
  }
  return (*m2 - 8.0 * *m1 + 8.0 * *p1 - *p2) / (12.0 * h);
}

// Relative residual of one identity at one radius. The denominator adds the
// size of the differentiated quantity over the local length scale, so that a
// derivative which passes through zero is not judged against zero.
inline std::optional<double> identity_residual_at(const Trajectory& traj, const Identity& id, double r) {
  const double h = fd_step(r);
  const auto fd = centered_difference(traj, id.value, r, h);
  const State s = traj.eval(r);
  const auto rhs = id.derivative(s);
  const auto val = id.value(s);
  if (!fd || !rhs || !val) {
    return std::nullopt;
  }
  const double scale = std::fabs(*rhs) + std::fabs(*val) / std::max(1.0, r);
  if (scale == 0.0) {
    return std::fabs(*fd);
  }
  return std::fabs(*fd - *rhs) / scale;
}

inline ResidualReport identity_residuals(const Trajectory& traj, const FieldParams& field,
                                         const std::vector<double>& probes) {
  const auto catalogue = identity_catalogue(field);
  const SingularRadii sr = singular_radii(traj);
  auto too_close = [](const std::vector<double>& zs, double r) {
    const double guard = 1e-6 * r + 2.0 * fd_step(r);
    return std::any_of(zs.begin(), zs.end(), [&](double z) { return std::fabs(z - r) <= guard; });
  };
  ResidualReport rep;
  for (const auto& id : catalogue) {
    IdentityResidual ir;
    ir.id = id.id;
    for (double r : probes) {
      const double h = fd_step(r);
      if (r - 2.0 * h < traj.r_begin() || r + 2.0 * h > traj.r_end()) {
        throw ProbeUndefined("probe r = " + std::to_string(r) + " leaves the covered range");
      }
      const bool needs_u = id.singular == Singular::ZeroU || id.singular == Singular::Both;
      const bool needs_up = id.singular == Singular::ZeroUp || id.singular == Singular::Both;
      if ((needs_u && too_close(sr.zeros_u, r)) || (needs_up && too_close(sr.zeros_up, r))) {
        throw ProbeUndefined("identity " + id.id + " is undefined near probe r = " + std::to_string(r));
      }
      const auto res = identity_residual_at(traj, id, r);
      if (!res) {
        throw ProbeUndefined("identity " + id.id + " could not be evaluated at r = " + std::to_string(r));
      }
      ++ir.probes;
      if (*res > ir.max_residual || !std::isfinite(*res)) {
        ir.max_residual = std::isfinite(*res) ? *res : HUGE_VAL;
        ir.worst_r = r;
      }
    }
    rep.identities.push_back(ir);
  }
  for (double r : probes) {
    const auto c = connection_residual(traj.eval(r), field);
    if (!c) {
      continue;
    }
    ++rep.connection_probes;
    if (*c > rep.connection_max) {
      rep.connection_max = *c;
      rep.connection_worst_r = r;
    }
  }
  return rep;
}

struct BridgeIntegral {
  double value = 0.0;
  double error = 0.0;
  bool empty_range = false;  // tau_i <= b_i; value is then 0 by convention
  bool reversed = false;     // tau_i < b_i
  double oriented = 0.0;     // signed integral from b_i to tau_i, whichever order
  bool singular_warning = false;
  bool converged = true;
  double lo = 0.0;
  double hi = 0.0;
};

// Integral over (b_i, tau_i) of u^2 (1 - |u/u_tilde|^{p-1}) Q_n / (r u'^2),
// where tau_i is the first zero of v after c_{i-1}. Positivity is only
// claimed when tau_i > b_i.
inline BridgeIntegral bridge_integral_I(const Trajectory& traj, const PhasePortrait& portrait, int i,
                                        double u_tilde) {
  const PhaseLabels* ph = nullptr;
  for (const auto& x : portrait.phases) {
    if (x.index == i) {
      ph = &x;
      break;
    }
  }
  if (ph == nullptr || !ph->b) {
    throw MissingEvents("phase " + std::to_string(i) + " has no b label");
  }
  std::optional<double> tau;
  for (const auto& e : portrait.zeros_v) {
    if (e.r > ph->c_prev) {
      tau = e.r;
      break;
    }
  }
  if (!tau) {
    throw MissingEvents("no zero of v after c_" + std::to_string(i - 1));
  }
  BridgeIntegral out;
  out.lo = ph->b->r;
  out.hi = *tau;
  if (out.hi == out.lo) {
    out.empty_range = true;
    return out;
  }
  if (out.hi < out.lo) {
    out.reversed = true;
    std::swap(out.lo, out.hi);
  }
  const FieldParams fp = traj.field();
  for (const auto& c : portrait.crits_u) {
    if (c.r > out.lo && c.r < out.hi) {
      out.singular_warning = true;
    }
  }
  auto integrand = [&](double r) {
    const State s = traj.eval(r);
    const AuxSample a = eval_aux(s, fp);
    return s.u * s.u * (1.0 - pow_abs(s.u / u_tilde, fp.p - 1.0)) * a.Qn / (r * s.up * s.up);
  };
  const QuadratureResult q = integrate_gk(integrand, out.lo, out.hi, 1e-10);
  out.oriented = out.reversed ? -q.value : q.value;
  out.value = out.reversed ? 0.0 : q.value;
  out.empty_range = out.reversed;
  out.error = q.error;
  out.converged = q.converged;
  return out;
}

// Radius in (lo, hi) where |u| = mu; |u| is assumed monotone there.
inline std::optional<double> matched_radius(const Trajectory& traj, double mu, double lo, double hi) {
  auto g = [&](double r) { return std::fabs(traj.eval(r).u) - mu; };
  const double glo = g(lo);
  const double ghi = g(hi);
  if ((glo < 0.0) == (ghi < 0.0) && glo != 0.0 && ghi != 0.0) {
    return std::nullopt;
  }
  return refine_root(g, lo, hi, glo, ghi, locator_tol(hi)).root;
}

struct ReflectionPoint {
  double mu = 0.0;
  double r_left = 0.0;
  double r_right = 0.0;
  double phi_left = 0.0;
  double phi_right = 0.0;
};

struct ReflectionReport {
  bool applicable = false;
  bool pass = true;
  double worst_margin = HUGE_VAL;  // min of phi_right - phi_left
  std::vector<ReflectionPoint> points;
};

// phi(r_bar_mu) > phi(r_mu) for mu on a grid in [alpha_*, |u(c_i)|), with
// r_mu in (c_{i-1}, b_i] and r_bar_mu in [b_bar_i, c_i).
inline ReflectionReport reflection_inequality(const Trajectory& traj, const PhasePortrait& portrait, int i,
                                              int grid = 16) {
  ReflectionReport rep;
  const PhaseLabels* ph = portrait.phase(i);
  if (ph == nullptr || !ph->b || !ph->b_bar || !ph->c || !ph->z) {
    return rep;
  }
  const FieldParams fp = traj.field();
  const double astar = critical_amplitudes(fp).alpha_star;
  const double top = std::fabs(ph->c->u);
  if (!(top > astar)) {
    return rep;
  }
  rep.applicable = true;
  const double left_lo = ph->c_prev > traj.r_begin() ? ph->c_prev : traj.r_begin();
  for (int j = 0; j < grid; ++j) {
    const double mu = astar + (top - astar) * static_cast<double>(j) / grid;
    const auto rl = j == 0 ? std::optional<double>(ph->b->r) : matched_radius(traj, mu, left_lo, ph->b->r);
    const auto rr = j == 0 ? std::optional<double>(ph->b_bar->r) : matched_radius(traj, mu, ph->b_bar->r, ph->c->r);
    if (!rl || !rr) {
      continue;
    }
    const auto pl = reflection_phi(traj.eval(*rl), fp);
    const auto pr = reflection_phi(traj.eval(*rr), fp);
    if (!pl || !pr) {
      continue;
    }
    rep.points.push_back({mu, *rl, *rr, *pl, *pr});
    rep.worst_margin = std::min(rep.worst_margin, *pr - *pl);
    if (!(*pr > *pl)) {
      rep.pass = false;
    }
  }
  return rep;
}

}  // namespace boundstate
