#pragma once

// Radial shooting integrator for the coupled system
//   u'' + (n-1)/r u' + f(u)     = 0,  u(0) = alpha, u'(0) = 0
//   v'' + (n-1)/r v' + f'(u) v  = 0,  v(0) = 1,     v'(0) = 0
// using the Dormand-Prince 5(4) pair with its fourth-order continuous
// extension as dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boundstate/errors.hpp"
#include "boundstate/scalar_field.hpp"

namespace boundstate {

struct IntegratorControls {
  // Series-start radius; unset means 1e-6 * max(1, alpha).
  std::optional<double> r0;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double r_max = 100.0;
  double v_guard = 1e12;
  long max_steps = 2'000'000;

  [[nodiscard]] double resolved_r0(double alpha) const {
    return r0 ? *r0 : 1e-6 * std::max(1.0, alpha);
  }

  void validate(double alpha) const {
    const double start = resolved_r0(alpha);
    if (!(start > 0.0) || !(start < 1e-2)) {
      throw ParameterError("series-start radius r0 must lie in (0, 1e-2)");
    }
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw ParameterError("tolerances must be positive");
    }
    if (!(r_max > start)) {
      throw ParameterError("r_max must exceed r0");
    }
    if (!(v_guard > 0.0)) {
      throw ParameterError("v_guard must be positive");
    }
    if (max_steps <= 0) {
      throw ParameterError("max_steps must be positive");
    }
  }

  // Same controls with both tolerances divided by `factor`.
  [[nodiscard]] IntegratorControls tightened(double factor) const {
    IntegratorControls c = *this;
    c.abs_tol /= factor;
    c.rel_tol /= factor;
    return c;
  }
};

struct ProblemParams {
  FieldParams field;
  double alpha = 1.0;
  IntegratorControls controls;

  void validate() const {
    field.validate();
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw ParameterError("initial amplitude alpha must be positive");
    }
    controls.validate(alpha);
  }
};

struct State {
  double r = 0.0;
  double u = 0.0;
  double up = 0.0;
  double v = 0.0;
  double vp = 0.0;
};

// d/dr of (u, u', v, v').
struct Rate {
  double du = 0.0;
  double dup = 0.0;
  double dv = 0.0;
  double dvp = 0.0;
};

enum class Termination { ReachedRMax, EnergyNonpositive, VariationDiverged, StepLimit, StepUnderflow };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedRMax: return "ReachedRMax";
    case Termination::EnergyNonpositive: return "EnergyNonpositive";
    case Termination::VariationDiverged: return "VariationDiverged";
    case Termination::StepLimit: return "StepLimit";
    case Termination::StepUnderflow: return "StepUnderflow";
  }
  return "?";
}

struct TerminationCause {
  Termination tag = Termination::ReachedRMax;
  double r_stop = 0.0;
  std::string detail;

  [[nodiscard]] bool failed() const {
    return tag == Termination::StepLimit || tag == Termination::StepUnderflow;
  }
};

// Which termination causes are armed. r_max, step limit and step underflow
// always are.
struct StopPolicy {
  bool on_energy = true;
  bool on_variation = false;

  // Node counting: stop once E <= 0 since no further zeros can occur.
  static StopPolicy classification() { return {true, false}; }
  // Structural checks: run to r_max, guarding against runaway v.
  static StopPolicy verification() { return {false, true}; }
};

inline double energy(double u, double up, const FieldParams& fp) {
  return 0.5 * up * up + big_F(u, fp);
}

inline Rate rhs(const State& s, const FieldParams& fp) {
  if (!(s.r > 0.0)) {
    throw DomainError("rhs evaluated at r <= 0");
  }
  const double k = static_cast<double>(fp.n - 1) / s.r;
  return {s.up, -k * s.up - f(s.u, fp), s.vp, -k * s.vp - f_prime(s.u, fp) * s.v};
}

// u'' recovered from the equation itself.
inline double u_second(const State& s, const FieldParams& fp) {
  return -static_cast<double>(fp.n - 1) / s.r * s.up - f(s.u, fp);
}

// Second-order Taylor data at r0; the local error is O(r0^4).
inline State series_start(const ProblemParams& pp) {
  const double r0 = pp.controls.resolved_r0(pp.alpha);
  const double n = static_cast<double>(pp.field.n);
  const double fa = f(pp.alpha, pp.field);
  const double fpa = f_prime(pp.alpha, pp.field);
  return {r0, pp.alpha - fa * r0 * r0 / (2.0 * n), -fa * r0 / n, 1.0 - fpa * r0 * r0 / (2.0 * n),
          -fpa * r0 / n};
}

class Trajectory {
 public:
  using Vec = std::array<double, 4>;

  // One accepted step on [r, r_hi]:
  //   y(r + theta h) = c0 + theta (c1 + (1-theta)(c2 + theta (c3 + (1-theta) c4))).
  // r_hi equals r + h except for a step cut by truncated().
  struct Step {
    double r = 0.0;
    double h = 0.0;
    double r_hi = 0.0;
    std::array<Vec, 5> coef{};
  };

  Trajectory() = default;

  [[nodiscard]] const std::vector<State>& samples() const { return samples_; }
  [[nodiscard]] const std::vector<Step>& steps() const { return steps_; }
  [[nodiscard]] const TerminationCause& termination() const { return termination_; }
  [[nodiscard]] const FieldParams& field() const { return field_; }
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double r_begin() const { return samples_.front().r; }
  [[nodiscard]] double r_end() const { return samples_.back().r; }
  [[nodiscard]] bool covers(double r) const { return r >= r_begin() && r <= r_end(); }

  // Dense evaluation anywhere in [r_begin, r_end]; sample radii return the
  // stored samples exactly.
  [[nodiscard]] State eval(double r) const {
    if (!(r >= r_begin() && r <= r_end())) {
      std::ostringstream oss;
      oss.precision(17);
      oss << "radius " << r << " outside covered range [" << r_begin() << ", " << r_end() << "]";
      throw RangeError(oss.str());
    }
    if (steps_.empty()) {
      return samples_.front();
    }
    const auto it = std::upper_bound(steps_.begin(), steps_.end(), r,
                                     [](double x, const Step& s) { return x < s.r; });
    const auto idx = static_cast<std::size_t>(it - steps_.begin()) - 1;
    const Step& st = steps_[idx];
    if (r == st.r) {
      return samples_[idx];
    }
    if (r >= st.r_hi) {
      return samples_[idx + 1];
    }
    const double th = (r - st.r) / st.h;
    const double th1 = 1.0 - th;
    const auto& c = st.coef;
    Vec y{};
    for (std::size_t i = 0; i < 4; ++i) {
      y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
    }
    return {r, y[0], y[1], y[2], y[3]};
  }

  // Copy restricted to [r_begin, r]. The final step keeps its polynomial, so
  // dense values inside the copy are bit-identical to the original.
  [[nodiscard]] Trajectory truncated(double r) const {
    if (r >= r_end()) {
      return *this;
    }
    if (!(r > r_begin())) {
      throw RangeError("truncation radius precedes the trajectory start");
    }
    Trajectory t;
    t.field_ = field_;
    t.alpha_ = alpha_;
    t.samples_.push_back(samples_.front());
    for (std::size_t i = 0; i < steps_.size() && steps_[i].r < r; ++i) {
      Step st = steps_[i];
      if (st.r_hi <= r) {
        t.steps_.push_back(st);
        t.samples_.push_back(samples_[i + 1]);
        continue;
      }
      const State end = eval(r);
      st.r_hi = r;
      t.steps_.push_back(st);
      t.samples_.push_back(end);
      break;
    }
    std::ostringstream oss;
    oss.precision(17);
    oss << "truncated at r = " << r << " (original: " << to_string(termination_.tag) << ")";
    t.termination_ = {Termination::ReachedRMax, t.r_end(), oss.str()};
    return t;
  }

 private:
  friend Trajectory integrate(const ProblemParams&, StopPolicy);

  std::vector<State> samples_;
  std::vector<Step> steps_;
  TerminationCause termination_;
  FieldParams field_;
  double alpha_ = 0.0;
};

inline State eval_dense(const Trajectory& traj, double r) { return traj.eval(r); }

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DP5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

using Vec = Trajectory::Vec;

inline Vec deriv(double r, const Vec& y, const FieldParams& fp) {
  const Rate k = rhs({r, y[0], y[1], y[2], y[3]}, fp);
  return {k.du, k.dup, k.dv, k.dvp};
}

inline Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (std::size_t i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (const auto& [w, k] : terms) {
      acc += w * (*k)[i];
    }
    out[i] += h * acc;
  }
  return out;
}

inline bool all_finite(const Vec& y) {
  return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

// Adaptive forward integration from the series start to the first armed
// termination cause. Never throws for numerical trouble: step-limit and
// step-underflow are reported through termination().
inline Trajectory integrate(const ProblemParams& pp, StopPolicy policy = StopPolicy::classification()) {
  pp.validate();
  using detail::DP5;
  using detail::Vec;
  const FieldParams& fp = pp.field;
  const IntegratorControls& ctl = pp.controls;

  Trajectory traj;
  traj.field_ = fp;
  traj.alpha_ = pp.alpha;

  const State s0 = series_start(pp);
  traj.samples_.push_back(s0);

  auto finish = [&](Termination tag, double r, std::string detail) {
    traj.termination_ = {tag, r, std::move(detail)};
    return traj;
  };

  if (policy.on_energy && energy(s0.u, s0.up, fp) <= 0.0) {
    return finish(Termination::EnergyNonpositive, s0.r, "E <= 0 at the series start");
  }

  double r = s0.r;
  Vec y{s0.u, s0.up, s0.v, s0.vp};
  Vec k1 = detail::deriv(r, y, fp);
  // Initial step from the local curvature scale.
  double h = 1e-3 / std::max(1.0, std::sqrt(std::fabs(f_prime(pp.alpha, fp))));
  long steps = 0;
  constexpr double kSafety = 0.9;
  constexpr double kMinFactor = 0.2;
  constexpr double kMaxFactor = 5.0;

  while (true) {
    if (steps >= ctl.max_steps) {
      return finish(Termination::StepLimit, r, "exceeded max_steps = " + std::to_string(ctl.max_steps));
    }
    const double room = ctl.r_max - r;
    bool last = false;
    if (h >= room) {
      h = room;
      last = true;
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(r))) {
      std::ostringstream oss;
      oss.precision(17);
      oss << "step size " << h << " underflowed at r = " << r;
      return finish(Termination::StepUnderflow, r, oss.str());
    }

    const Vec k2 = detail::deriv(r + DP5::c2 * h, detail::axpy(y, h, {{DP5::a21, &k1}}), fp);
    const Vec k3 = detail::deriv(r + DP5::c3 * h, detail::axpy(y, h, {{DP5::a31, &k1}, {DP5::a32, &k2}}), fp);
    const Vec k4 = detail::deriv(
        r + DP5::c4 * h, detail::axpy(y, h, {{DP5::a41, &k1}, {DP5::a42, &k2}, {DP5::a43, &k3}}), fp);
    const Vec k5 = detail::deriv(
        r + DP5::c5 * h,
        detail::axpy(y, h, {{DP5::a51, &k1}, {DP5::a52, &k2}, {DP5::a53, &k3}, {DP5::a54, &k4}}), fp);
    const Vec k6 = detail::deriv(
        r + h,
        detail::axpy(y, h, {{DP5::a61, &k1}, {DP5::a62, &k2}, {DP5::a63, &k3}, {DP5::a64, &k4}, {DP5::a65, &k5}}),
        fp);
    const Vec y1 = detail::axpy(
        y, h, {{DP5::a71, &k1}, {DP5::a73, &k3}, {DP5::a74, &k4}, {DP5::a75, &k5}, {DP5::a76, &k6}});
    const double r1 = last ? ctl.r_max : r + h;
    const Vec k7 = detail::deriv(r1, y1, fp);

    double err = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double e = h * (DP5::e1 * k1[i] + DP5::e3 * k3[i] + DP5::e4 * k4[i] + DP5::e5 * k5[i] +
                            DP5::e6 * k6[i] + DP5::e7 * k7[i]);
      const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::fabs(y[i]), std::fabs(y1[i]));
      err = std::max(err, std::fabs(e) / sc);
    }
    ++steps;
    if (!detail::all_finite(y1) || !detail::all_finite(k7) || !std::isfinite(err)) {
      h *= kMinFactor;
      continue;
    }
    if (err > 1.0) {
      h *= std::max(kMinFactor, kSafety * std::pow(err, -0.2));
      continue;
    }

    Trajectory::Step st;
    st.r = r;
    st.h = h;
    st.r_hi = r1;
    for (std::size_t i = 0; i < 4; ++i) {
      const double diff = y1[i] - y[i];
      const double c2 = h * k1[i] - diff;
      st.coef[0][i] = y[i];
      st.coef[1][i] = diff;
      st.coef[2][i] = c2;
      st.coef[3][i] = diff - h * k7[i] - c2;
      st.coef[4][i] = h * (DP5::d1 * k1[i] + DP5::d3 * k3[i] + DP5::d4 * k4[i] + DP5::d5 * k5[i] +
                           DP5::d6 * k6[i] + DP5::d7 * k7[i]);
    }
    traj.steps_.push_back(st);
    r = r1;
    y = y1;
    k1 = k7;
    traj.samples_.push_back({r, y[0], y[1], y[2], y[3]});

    if (policy.on_energy && energy(y[0], y[1], fp) <= 0.0) {
      return finish(Termination::EnergyNonpositive, r, "E <= 0");
    }
    if (policy.on_variation && std::fabs(y[2]) > ctl.v_guard) {
      return finish(Termination::VariationDiverged, r, "|v| exceeded v_guard");
    }
    if (last) {
      return finish(Termination::ReachedRMax, r, "reached r_max");
    }
    const double fac = err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
    h *= fac;
  }
}

}  // namespace boundstate
