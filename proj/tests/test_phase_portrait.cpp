#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "boundstate/classifier.hpp"
#include "boundstate/phase_portrait.hpp"
#include "boundstate/verify.hpp"

using namespace boundstate;

namespace {

const FieldParams kCubic{3, 3.0};

const LadderEntry& bracket(int k) {
  static std::map<int, LadderEntry> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, find_alpha_k(kCubic, k, 1e-12, {})).first;
  return it->second;
}

// Bracket-midpoint shot cut where |u| first drops to 1e-5 after c_k.
Trajectory bound_view(int k) {
  const Trajectory t = integrate({kCubic, bracket(k).midpoint(), {}}, StopPolicy::verification());
  return t.truncated(detail::truncation_radius(t, k, 1e-5));
}

TEST(DetectEvents, ConstantSolutionIsEmpty) {
  const Trajectory t = integrate({kCubic, 1.0, {}}, StopPolicy::verification());
  const PhasePortrait pp = detect_events(t);
  EXPECT_TRUE(pp.zeros_u.empty());
  EXPECT_TRUE(pp.crits_u.empty());
  EXPECT_TRUE(pp.phases.empty());
  EXPECT_EQ(pp.node_count(), 0);
}

TEST(DetectEvents, SmallAmplitudeOscillatesAboutOne) {
  const Trajectory t = integrate({kCubic, 0.5, {}}, StopPolicy::verification());
  const PhasePortrait pp = detect_events(t);
  EXPECT_TRUE(pp.zeros_u.empty());
  ASSERT_GE(pp.crits_u.size(), 4u);
  for (std::size_t i = 0; i < pp.crits_u.size(); ++i) {
    // c_0 = 0 is a minimum at 0.5, so c_1 is a maximum above 1.
    if (i % 2 == 0) {
      EXPECT_GT(pp.crits_u[i].u, 1.0) << i;
    } else {
      EXPECT_LT(pp.crits_u[i].u, 1.0) << i;
      EXPECT_GT(pp.crits_u[i].u, 0.0) << i;
    }
  }
  EXPECT_EQ(pp.phase_kind, PhaseKind::TailOscillatory);
}

TEST(DetectEvents, JustAboveGroundBracket) {
  const double a = bracket(0).alpha_hi * (1 + 1e-6);
  const Trajectory t = integrate({kCubic, a, {}}, StopPolicy::verification());
  const PhasePortrait pp = detect_events(t);
  ASSERT_EQ(pp.node_count(), 1);
  const PhaseLabels* ph = pp.phase(1);
  ASSERT_NE(ph, nullptr);
  ASSERT_TRUE(ph->b && ph->r && ph->z && ph->r_bar && ph->c);
  EXPECT_LT(ph->b->r, ph->r->r);
  EXPECT_LT(ph->r->r, ph->z->r);
  EXPECT_LT(ph->z->r, ph->r_bar->r);
  EXPECT_LT(ph->r_bar->r, ph->c->r);
  // The single zero is the last one: the shot falls into the well about -1
  // and never climbs back to alpha_*, so there is no b_bar_1.
  const double as = critical_amplitudes(kCubic).alpha_star;
  EXPECT_LT(std::fabs(ph->c->u), as);
  EXPECT_GT(std::fabs(ph->c->u), 1.0);
  EXPECT_FALSE(ph->b_bar);
}

TEST(DetectEvents, FullLabelsOnBoundStatePhase) {
  const Trajectory t = bound_view(2);
  const PhasePortrait pp = detect_events(t);
  ASSERT_EQ(pp.node_count(), 2);
  for (int i = 1; i <= 2; ++i) {
    const PhaseLabels* ph = pp.phase(i);
    ASSERT_NE(ph, nullptr);
    ASSERT_TRUE(ph->b && ph->r && ph->z && ph->r_bar && ph->b_bar && ph->c) << i;
    EXPECT_LT(ph->c_prev, ph->b->r);
    EXPECT_LT(ph->b->r, ph->r->r);
    EXPECT_LT(ph->r->r, ph->z->r);
    EXPECT_LT(ph->z->r, ph->r_bar->r);
    EXPECT_LT(ph->r_bar->r, ph->b_bar->r);
    EXPECT_LT(ph->b_bar->r, ph->c->r);
  }
  EXPECT_EQ(pp.phase(2)->c_prev, pp.phase(1)->c->r);
}

TEST(DetectEvents, LocatorsRefineToTolerance) {
  const Trajectory t = integrate({kCubic, 10.0, {}}, StopPolicy::verification());
  const double as = critical_amplitudes(kCubic).alpha_star;
  for (auto target : {EventTarget::ZeroU, EventTarget::ZeroUp, EventTarget::ZeroV}) {
    for (const auto& l : locate_events(t, target, t.r_begin(), t.r_end())) {
      EXPECT_GE(l.root, l.r_lo);
      EXPECT_LE(l.root, l.r_hi);
      // The root is pinned to within the locator tolerance.
      const double h = locator_tol(l.root);
      const double a = event_value(target, t.eval(l.root - h), kCubic, as);
      const double b = event_value(target, t.eval(l.root + h), kCubic, as);
      EXPECT_LE(a * b, 0.0) << to_string(target) << " at " << l.root;
    }
  }
}

TEST(CountNodes, Examples) {
  EXPECT_EQ(count_nodes(integrate({kCubic, 0.5, {}}, StopPolicy::classification())), 0);
  EXPECT_EQ(count_nodes(integrate({kCubic, 1.0, {}}, StopPolicy::classification())), 0);

  // Two tolerance settings must agree for alpha = 10.
  IntegratorControls tight;
  tight.abs_tol = 1e-12;
  tight.rel_tol = 1e-12;
  const int loose = count_nodes(integrate({kCubic, 10.0, {}}, StopPolicy::classification()));
  const int fine = count_nodes(integrate({kCubic, 10.0, tight}, StopPolicy::classification()));
  EXPECT_EQ(loose, fine);
  EXPECT_EQ(loose, 1);
}

TEST(CountNodes, FailedRunThrows) {
  IntegratorControls c;
  c.max_steps = 5;
  const Trajectory t = integrate({kCubic, 5.0, c}, StopPolicy::classification());
  EXPECT_THROW(count_nodes(t), IndeterminateCount);
}

TEST(Inflection, GroundCandidateHasOneBeforeR1) {
  const double a = bracket(0).alpha_lo * (1 - 1e-6);
  const Trajectory t = integrate({kCubic, a, {}}, StopPolicy::classification());
  const PhasePortrait pp = detect_events(t);
  const InflectionReport rep = unique_inflection_check(t, pp);
  EXPECT_TRUE(rep.pass);
  ASSERT_EQ(rep.intervals.size(), 1u);
  EXPECT_EQ(rep.intervals[0].lo, 0.0);
  EXPECT_EQ(rep.intervals[0].count, 1);
}

TEST(Inflection, TwoNodeTrajectory) {
  const Trajectory t = bound_view(2);
  const PhasePortrait pp = detect_events(t);
  const InflectionReport rep = unique_inflection_check(t, pp);
  EXPECT_TRUE(rep.pass);
  ASSERT_EQ(rep.intervals.size(), 2u);
  EXPECT_DOUBLE_EQ(rep.intervals[1].lo, pp.phase(1)->c->r);
  EXPECT_EQ(rep.intervals[1].count, 1);
}

TEST(Inflection, ConstantIsVacuous) {
  const Trajectory t = integrate({kCubic, 1.0, {}}, StopPolicy::verification());
  const InflectionReport rep = unique_inflection_check(t, detect_events(t));
  EXPECT_TRUE(rep.pass);
  EXPECT_TRUE(rep.intervals.empty());
}

class BoundStructure : public ::testing::TestWithParam<int> {};

TEST_P(BoundStructure, Tango) {
  const int k = GetParam();
  const Trajectory t = bound_view(k);
  const PhasePortrait pp = detect_events(t);
  ASSERT_EQ(pp.node_count(), k);
  const double zk = pp.zeros_u.back().r;
  std::vector<double> taus;
  for (const auto& e : pp.zeros_v) {
    if (e.r <= zk) taus.push_back(e.r);
  }
  ASSERT_EQ(static_cast<int>(taus.size()), k);
  for (int i = 0; i < k; ++i) {
    const double lo = i == 0 ? 0.0 : pp.zeros_u[i - 1].r;
    EXPECT_GT(taus[i], lo);
    EXPECT_LT(taus[i], pp.zeros_u[i].r);
    const State s = t.eval(taus[i]);
    EXPECT_GT(s.up * s.vp, 0.0) << "tau_" << i + 1;
  }
  for (const auto& z : pp.zeros_u) EXPECT_NE(t.eval(z.r).v, 0.0);
}

TEST_P(BoundStructure, TauLocalization) {
  const Trajectory t = bound_view(GetParam());
  const PhasePortrait pp = detect_events(t);
  for (int i = 1; i <= GetParam(); ++i) {
    const PhaseLabels* ph = pp.phase(i);
    ASSERT_TRUE(ph && ph->r);
    int inside = 0;
    for (const auto& e : pp.zeros_v) inside += e.r > ph->c_prev && e.r < ph->r->r;
    EXPECT_EQ(inside, 1) << "phase " << i;
  }
}

TEST_P(BoundStructure, CriticalAmplitudesDecrease) {
  const Trajectory t = bound_view(GetParam());
  const PhasePortrait pp = detect_events(t);
  const double as = critical_amplitudes(kCubic).alpha_star;
  ASSERT_GE(static_cast<int>(pp.crits_u.size()), GetParam());
  for (int i = 0; i < GetParam(); ++i) {
    EXPECT_GT(std::fabs(pp.crits_u[i].u), as);
    if (i > 0) {
      EXPECT_LT(std::fabs(pp.crits_u[i].u), std::fabs(pp.crits_u[i - 1].u));
    }
    EXPECT_LT(pp.zeros_u[i].r, pp.crits_u[i].r);
    if (i + 1 < GetParam()) {
      EXPECT_LT(pp.crits_u[i].r, pp.zeros_u[i + 1].r);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Nodes, BoundStructure, ::testing::Values(1, 2, 3));

class TailDichotomy : public ::testing::TestWithParam<double> {};

TEST_P(TailDichotomy, CriticalValuesConvergeToOne) {
  const Trajectory t = integrate({kCubic, GetParam(), {}}, StopPolicy::verification());
  const PhasePortrait pp = detect_events(t);
  const double z_last = pp.zeros_u.empty() ? 0.0 : pp.zeros_u.back().r;
  const double sgn = t.samples().back().u > 0 ? 1.0 : -1.0;
  const double as = critical_amplitudes(kCubic).alpha_star;
  std::vector<double> hi, lo;
  for (const auto& c : pp.crits_u) {
    if (c.r <= z_last) continue;
    const double w = sgn * c.u;
    if (w > 1.0) {
      hi.push_back(w);
    } else {
      lo.push_back(w);
    }
  }
  ASSERT_GE(hi.size(), 3u);
  ASSERT_GE(lo.size(), 3u);
  // The first excursion after the last zero may still exceed alpha_* for
  // shots that have not yet lost enough energy.
  for (std::size_t j = 1; j < hi.size(); ++j) {
    EXPECT_LT(hi[j], hi[j - 1]);
    EXPECT_LT(hi[j], as);
  }
  for (std::size_t j = 1; j < lo.size(); ++j) {
    EXPECT_GT(lo[j], lo[j - 1]);
    EXPECT_GT(lo[j], 0.0);
  }
}

INSTANTIATE_TEST_SUITE_P(Amplitudes, TailDichotomy, ::testing::Values(0.5, 3.0, 10.0));

}  // namespace
