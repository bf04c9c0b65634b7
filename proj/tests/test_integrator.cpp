#include <gtest/gtest.h>

#include <cmath>

#include "boundstate/integrator.hpp"

using namespace boundstate;

namespace {

const FieldParams kCubic{3, 3.0};

Trajectory shot(double alpha, StopPolicy policy = StopPolicy::verification(), IntegratorControls c = {}) {
  return integrate({kCubic, alpha, c}, policy);
}

TEST(Rhs, Examples) {
  const Rate a = rhs({1.0, 1.0, 0.0, 1.0, 0.0}, kCubic);
  EXPECT_EQ(a.du, 0.0);
  EXPECT_EQ(a.dup, 0.0);
  EXPECT_EQ(a.dv, 0.0);
  EXPECT_NEAR(a.dvp, -2.0, 1e-14);

  const Rate b = rhs({2.0, 0.0, -1.0, 0.0, -1.0}, kCubic);
  EXPECT_EQ(b.du, -1.0);
  EXPECT_NEAR(b.dup, 1.0, 1e-15);
  EXPECT_EQ(b.dv, -1.0);
  EXPECT_NEAR(b.dvp, 1.0, 1e-15);

  EXPECT_THROW(rhs({0.0, 1.0, 0.0, 1.0, 0.0}, kCubic), DomainError);
}

TEST(Rhs, ReflectionSymmetry) {
  for (double u : {-2.0, -0.3, 0.7, 1.8}) {
    const State s{1.3, u, 0.4, 0.9, -0.2};
    const State m{1.3, -u, -0.4, 0.9, -0.2};
    const Rate a = rhs(s, kCubic);
    const Rate b = rhs(m, kCubic);
    EXPECT_EQ(a.du, -b.du);
    EXPECT_EQ(a.dup, -b.dup);
    EXPECT_EQ(a.dv, b.dv);
    EXPECT_EQ(a.dvp, b.dvp);
  }
}

TEST(SeriesStart, Examples) {
  IntegratorControls c;
  c.r0 = 1e-4;
  const State one = series_start({kCubic, 1.0, c});
  EXPECT_EQ(one.u, 1.0);
  EXPECT_EQ(one.up, 0.0);

  const State two = series_start({kCubic, 2.0, c});
  EXPECT_NEAR(two.u, 2.0 - 1e-8, 1e-15);

  for (double r0 : {1e-3, 1e-5, 1e-7}) {
    c.r0 = r0;
    const State s = series_start({kCubic, 3.0, c});
    EXPECT_NEAR(s.v, 1.0, 10 * r0 * r0 * 26.0);
    EXPECT_NEAR(s.vp, 0.0, r0 * 26.0);
  }
}

TEST(Controls, Validation) {
  IntegratorControls c;
  EXPECT_NO_THROW(c.validate(1.0));
  c.abs_tol = 0.0;
  EXPECT_THROW(c.validate(1.0), ParameterError);
  c = {};
  c.r0 = 0.5;
  EXPECT_THROW(c.validate(1.0), ParameterError);
  c = {};
  c.r_max = 0.0;
  EXPECT_THROW(c.validate(1.0), ParameterError);
  EXPECT_THROW(integrate({kCubic, -1.0, {}}), ParameterError);
  EXPECT_THROW(integrate({{3, 5.0}, 2.0, {}}), ParameterError);
}

TEST(Integrate, ConstantSolution) {
  IntegratorControls c;
  const Trajectory t = shot(1.0, StopPolicy::verification(), c);
  EXPECT_EQ(t.termination().tag, Termination::ReachedRMax);
  EXPECT_DOUBLE_EQ(t.r_end(), c.r_max);
  for (const auto& s : t.samples()) {
    ASSERT_NEAR(s.u, 1.0, c.abs_tol);
    ASSERT_NEAR(s.up, 0.0, c.abs_tol);
  }
}

TEST(Integrate, SmallAmplitudeStaysPositive) {
  const Trajectory t = shot(0.5, StopPolicy::classification());
  EXPECT_EQ(t.termination().tag, Termination::EnergyNonpositive);
  for (const auto& s : t.samples()) EXPECT_GT(s.u, 0.0);
  const Trajectory full = shot(0.5);
  for (const auto& s : full.samples()) ASSERT_GT(s.u, 0.0) << s.r;
}

TEST(Integrate, LargeAmplitudeChangesSign) {
  const Trajectory t = shot(10.0, StopPolicy::classification());
  bool neg = false;
  for (const auto& s : t.samples()) neg = neg || s.u < 0.0;
  EXPECT_TRUE(neg);
  EXPECT_EQ(t.termination().tag, Termination::EnergyNonpositive);
}

TEST(Integrate, StepLimitIsReportedNotThrown) {
  IntegratorControls c;
  c.max_steps = 5;
  const Trajectory t = shot(5.0, StopPolicy::verification(), c);
  EXPECT_EQ(t.termination().tag, Termination::StepLimit);
  EXPECT_TRUE(t.termination().failed());
}

TEST(Integrate, VariationGuard) {
  IntegratorControls c;
  c.v_guard = 1e3;
  const Trajectory t = shot(4.3373876661, StopPolicy::verification(), c);
  EXPECT_EQ(t.termination().tag, Termination::VariationDiverged);
  EXPECT_GT(std::fabs(t.samples().back().v), 1e3);
}

TEST(Trajectory, Invariants) {
  const Trajectory t = shot(3.0);
  const auto& s = t.samples();
  ASSERT_FALSE(s.empty());
  for (std::size_t i = 1; i < s.size(); ++i) ASSERT_GT(s[i].r, s[i - 1].r);
  for (std::size_t i = 0; i < s.size(); i += 37) {
    const State e = t.eval(s[i].r);
    EXPECT_NEAR(e.u, s[i].u, 1e-12);
    EXPECT_NEAR(e.v, s[i].v, 1e-12);
  }
  EXPECT_THROW((void)t.eval(t.r_end() + 1.0), RangeError);
  EXPECT_THROW((void)t.eval(0.0), RangeError);
}

TEST(Trajectory, DenseOutputIsContinuous) {
  const Trajectory t = shot(5.0);
  const auto& st = t.steps();
  for (std::size_t i = 0; i + 1 < st.size(); i += 11) {
    const double r = st[i].r_hi;
    const double eps = 1e-9 * std::max(1.0, r);
    const State a = t.eval(r - eps);
    const State b = t.eval(r + eps);
    EXPECT_NEAR(a.u, b.u, 1e-8 * std::max(1.0, std::fabs(a.u)));
    EXPECT_NEAR(a.up, b.up, 1e-7 * std::max(1.0, std::fabs(a.up)));
  }
  // Midpoints sit between neighbouring samples to first order.
  for (std::size_t i = 0; i + 1 < st.size(); i += 53) {
    const double m = 0.5 * (st[i].r + st[i].r_hi);
    const State a = t.eval(st[i].r);
    const State c = t.eval(m);
    EXPECT_NEAR(c.u, a.u + a.up * (m - st[i].r), 0.5 * (m - st[i].r) * (m - st[i].r) * 400.0);
  }
}

TEST(Trajectory, TruncationKeepsDenseValues) {
  const Trajectory t = shot(5.0);
  const double cut = 0.5 * (t.r_begin() + t.r_end()) + 0.123;
  const Trajectory c = t.truncated(cut);
  EXPECT_DOUBLE_EQ(c.r_end(), cut);
  for (double r : {0.3, 1.7, cut - 0.01}) {
    EXPECT_EQ(c.eval(r).u, t.eval(r).u);
  }
  EXPECT_EQ(c.eval(cut).u, t.eval(cut).u);
  EXPECT_THROW((void)c.eval(cut + 1e-6), RangeError);
}

class IntegratorProperty : public ::testing::TestWithParam<double> {};

TEST_P(IntegratorProperty, EnergyDissipation) {
  IntegratorControls c;
  const Trajectory t = shot(GetParam(), StopPolicy::verification(), c);
  const auto& s = t.samples();
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double e0 = energy(s[i - 1].u, s[i - 1].up, kCubic);
    const double e1 = energy(s[i].u, s[i].up, kCubic);
    ASSERT_LE(e1 - e0, 10.0 * (c.abs_tol + c.rel_tol * std::fabs(e0))) << "r=" << s[i].r;
  }
}

TEST_P(IntegratorProperty, VelocityBound) {
  const double alpha = GetParam();
  const double D = std::sqrt(2.0 * (big_F(alpha, kCubic) + std::fabs(big_F(1.0, kCubic))));
  const Trajectory t = shot(alpha);
  for (const auto& s : t.samples()) ASSERT_LT(std::fabs(s.up), D) << s.r;
}

TEST_P(IntegratorProperty, ToleranceConvergence) {
  IntegratorControls loose;
  loose.abs_tol = 1e-9;
  loose.rel_tol = 1e-9;
  IntegratorControls half = loose;
  half.abs_tol /= 2;
  half.rel_tol /= 2;
  const Trajectory a = shot(GetParam(), StopPolicy::verification(), loose);
  const Trajectory b = shot(GetParam(), StopPolicy::verification(), half);
  for (double r : {0.5, 1.0, 2.0, 3.0, 5.0}) {
    const double ua = a.eval(r).u;
    const double ub = b.eval(r).u;
    EXPECT_LT(std::fabs(ua - ub), 10.0 * (loose.abs_tol + loose.rel_tol * std::fabs(ua))) << "r=" << r;
  }
}

INSTANTIATE_TEST_SUITE_P(Amplitudes, IntegratorProperty, ::testing::Values(0.5, 1.2, 3.0, 5.0, 8.0));

}  // namespace
