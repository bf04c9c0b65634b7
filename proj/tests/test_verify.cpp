#include <gtest/gtest.h>

#include <set>

#include "boundstate/verify.hpp"

using namespace boundstate;

namespace {

const FieldParams kCubic{3, 3.0};

VerificationPlan plan_of(std::vector<VerificationCase> cases, std::vector<std::string> checks = all_check_ids()) {
  VerificationPlan plan;
  plan.cases = std::move(cases);
  plan.checks = std::move(checks);
  return plan;
}

const CheckRecord& record(const VerificationReport& rep, const VerificationCase& vc, const std::string& check) {
  const CheckRecord* r = rep.find(vc.id(), check);
  if (r == nullptr) throw std::runtime_error("missing record " + vc.id() + " / " + check);
  return *r;
}

TEST(VerificationPlan, Validation) {
  const VerificationCase one{kCubic, CaseFamily::Explicit, 0, 1.0};
  EXPECT_NO_THROW(plan_of({one}).validate());
  EXPECT_THROW(plan_of({}).validate(), ParameterError);
  EXPECT_THROW(plan_of({one}, {}).validate(), ParameterError);
  EXPECT_THROW(plan_of({one}, {"tango", "no_such_check"}).validate(), ParameterError);
  EXPECT_THROW(plan_of({one}, {"tango", "tango"}).validate(), ParameterError);
  EXPECT_THROW(plan_of({{kCubic, CaseFamily::BoundBracket, 0, 0.0}}).validate(), ParameterError);
  EXPECT_THROW(plan_of({{kCubic, CaseFamily::Oscillatory, 0, -2.0}}).validate(), ParameterError);
  EXPECT_THROW(plan_of({{{3, 5.0}, CaseFamily::Explicit, 0, 1.0}}).validate(), ParameterError);
  EXPECT_THROW(run_checks(plan_of({one}, {})), ParameterError);
}

TEST(VerificationCase, Ids) {
  EXPECT_EQ((VerificationCase{kCubic, CaseFamily::BoundBracket, 2, 0.0}.id()), "n=3,p=3,BoundBracket(2)");
  EXPECT_EQ((VerificationCase{{4, 2.0}, CaseFamily::GroundBracket, 0, 0.0}.id()), "n=4,p=2,GroundBracket");
  EXPECT_EQ((VerificationCase{kCubic, CaseFamily::Oscillatory, 0, 0.5}.id()), "n=3,p=3,Oscillatory(0.5)");
}

TEST(RunChecks, ConstantCasePassesVacuously) {
  const VerificationCase one{kCubic, CaseFamily::Explicit, 0, 1.0};
  const VerificationReport rep = run_checks(plan_of({one}));
  ASSERT_EQ(rep.records.size(), all_check_ids().size());
  EXPECT_TRUE(rep.all_passed());
  for (const auto& r : rep.records) EXPECT_NE(r.status, CheckStatus::Fail) << r.check << ": " << r.notes;
}

TEST(RunChecks, TangoOnFirstBoundBracket) {
  const VerificationCase b1{kCubic, CaseFamily::BoundBracket, 1, 0.0};
  const VerificationReport rep = run_checks(plan_of({b1}, {"tango", "tau_localization", "renewability"}));
  const CheckRecord& tango = record(rep, b1, "tango");
  EXPECT_EQ(tango.status, CheckStatus::Pass) << tango.notes;
  // One tau on [0, z_1], tau_2 beyond c_1, sign checks at both, v(z_1) != 0.
  EXPECT_GE(tango.probe_count, 6);
  EXPECT_EQ(record(rep, b1, "tau_localization").status, CheckStatus::Pass);
  EXPECT_EQ(record(rep, b1, "renewability").status, CheckStatus::Pass);
}

TEST(RunChecks, ThreeNodeRenewability) {
  const VerificationCase b3{kCubic, CaseFamily::BoundBracket, 3, 0.0};
  const VerificationReport rep = run_checks(plan_of({b3}, {"renewability", "phase_windows", "reflection_inequality"}));
  for (const auto& r : rep.records) EXPECT_EQ(r.status, CheckStatus::Pass) << r.check << ": " << r.notes;
}

TEST(RunChecks, BridgeIntegralRecords) {
  // p = 1.5, k = 1: tau_1 < b_1, so the integration range is empty and the
  // record carries the oriented value instead of a verdict.
  const VerificationCase b1{{3, 1.5}, CaseFamily::BoundBracket, 1, 0.0};
  const VerificationCase g{{3, 1.2}, CaseFamily::GroundBracket, 0, 0.0};
  const VerificationCase cubic{kCubic, CaseFamily::BoundBracket, 1, 0.0};
  const VerificationReport rep = run_checks(plan_of({b1, g, cubic}, {"bridge_integral"}));
  const CheckRecord& r1 = record(rep, b1, "bridge_integral");
  EXPECT_EQ(r1.status, CheckStatus::SkippedUndefined);
  EXPECT_NE(r1.notes.find("I_1: tau < b"), std::string::npos) << r1.notes;
  EXPECT_NE(r1.notes.find("oriented integral 0.24"), std::string::npos) << r1.notes;

  const CheckRecord& r2 = record(rep, g, "bridge_integral");
  EXPECT_EQ(r2.status, CheckStatus::Pass) << r2.notes;
  EXPECT_GT(r2.worst_margin, 0.0);
  EXPECT_NE(r2.notes.find("I_1 = "), std::string::npos);

  EXPECT_EQ(record(rep, cubic, "bridge_integral").status, CheckStatus::SkippedUndefined);
}

TEST(RunChecks, NodalShot) {
  const VerificationCase osc{kCubic, CaseFamily::Oscillatory, 0, 10.0};
  const VerificationReport rep = run_checks(plan_of({osc}));
  for (const auto& r : rep.records) EXPECT_NE(r.status, CheckStatus::Fail) << r.check << ": " << r.notes;
  EXPECT_EQ(record(rep, osc, "tail_dichotomy").status, CheckStatus::Pass);
  EXPECT_EQ(record(rep, osc, "tail_asymptotics").status, CheckStatus::SkippedUndefined);
  EXPECT_EQ(record(rep, osc, "v_divergence").status, CheckStatus::SkippedUndefined);
}

TEST(RunChecks, TailAsymptoticsReportsBothGaps) {
  const VerificationCase b1{kCubic, CaseFamily::BoundBracket, 1, 0.0};
  const VerificationReport rep = run_checks(plan_of({b1}, {"tail_asymptotics"}));
  const CheckRecord& r = record(rep, b1, "tail_asymptotics");
  ASSERT_EQ(r.probe_count, 1);
  EXPECT_NE(r.notes.find("|u'/u + 1 + (n-1)/(2r)|"), std::string::npos);
  // Literal margin is 0.05 - |u'/u + 1|; the gap is about (n-1)/(2r).
  EXPECT_EQ(r.status == CheckStatus::Pass, r.worst_margin > 0.0);
}

TEST(RunChecks, CompletenessAndOrder) {
  const std::vector<VerificationCase> cases{{kCubic, CaseFamily::Explicit, 0, 1.0},
                                            {kCubic, CaseFamily::Oscillatory, 0, 0.5},
                                            {kCubic, CaseFamily::Oscillatory, 0, 7.0}};
  const std::vector<std::string> checks{"energy_monotone", "tango", "cross_tolerance", "omega_monotone"};
  const VerificationReport rep = run_checks(plan_of(cases, checks));
  ASSERT_EQ(rep.records.size(), cases.size() * checks.size());
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : rep.records) EXPECT_TRUE(seen.insert({r.case_id, r.check}).second);
  // Cases keep plan order; cross_tolerance leads within each case.
  for (std::size_t c = 0; c < cases.size(); ++c) {
    EXPECT_EQ(rep.records[c * checks.size()].case_id, cases[c].id());
    EXPECT_EQ(rep.records[c * checks.size()].check, "cross_tolerance");
  }
}

TEST(RunChecks, Deterministic) {
  const std::vector<VerificationCase> cases{{kCubic, CaseFamily::BoundBracket, 1, 0.0},
                                            {kCubic, CaseFamily::Oscillatory, 0, 6.0}};
  const VerificationReport a = run_checks(plan_of(cases));
  const VerificationReport b = run_checks(plan_of(cases));
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].check, b.records[i].check);
    EXPECT_EQ(a.records[i].case_id, b.records[i].case_id);
    EXPECT_EQ(a.records[i].status, b.records[i].status);
    EXPECT_EQ(a.records[i].worst_margin, b.records[i].worst_margin);
    EXPECT_EQ(a.records[i].probe_count, b.records[i].probe_count);
    EXPECT_EQ(a.records[i].notes, b.records[i].notes);
  }
}

TEST(RunChecks, SetupFailureFailsEveryCheck) {
  VerificationPlan plan = plan_of({{kCubic, CaseFamily::BoundBracket, 1, 0.0}}, {"tango", "energy_monotone"});
  plan.controls.max_steps = 40;
  const VerificationReport rep = run_checks(plan);
  ASSERT_EQ(rep.records.size(), 2u);
  for (const auto& r : rep.records) EXPECT_EQ(r.status, CheckStatus::Fail);
}

TEST(RenewabilityAudit, TruncatedPhaseIsSkipped) {
  const Trajectory t = integrate({kCubic, 5.0, {}}, StopPolicy::classification());
  const PhasePortrait pp = detect_events(t);
  const CheckRecord r = renewability_audit(t, pp, kCubic, 1, "shot");
  EXPECT_EQ(r.status, CheckStatus::SkippedUndefined) << r.notes;
}

TEST(PresetPlan, Shapes) {
  const VerificationPlan core = preset_plan("core", kCubic);
  EXPECT_EQ(core.cases.size(), 7u);
  EXPECT_EQ(core.checks, all_check_ids());
  const VerificationPlan res = preset_plan("residual", {3, 1.5});
  EXPECT_EQ(res.cases.size(), 3u);
  EXPECT_THROW(preset_plan("nope", kCubic), ParameterError);
}

}  // namespace
