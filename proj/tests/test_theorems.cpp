#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace sei;
using testing_support::extra;
using testing_support::worked;

namespace {

std::vector<std::pair<std::string, Scenario>> corpus() {
  std::vector<std::pair<std::string, Scenario>> out;
  for (const char* n : {"root_zero_map", "plateau_atan", "step_ramp", "plateau_atan_quasi", "cubic_quadrant", "neg_quad_quadrant"})
    out.emplace_back(n, worked(n));
  for (const char* n : {"abs_zero_map", "const_half", "cubic_pullback", "double_well", "root_constrained",
                        "root_nonpositive", "neg_linear_const_map", "quad_zero_map", "sphere", "strict_quad",
                        "infeasible"})
    out.emplace_back(n, extra(n));
  return out;
}

std::vector<SampleTuple> tuples_for(const Scenario& sc) { return enumerate(SamplePlan{}, sc.region).tuples; }

void expect_consistent(const TheoremVerdict& v, const std::string& where) {
  EXPECT_TRUE(v.consistent) << where << " " << v.id;
  for (const auto& note : v.notes) EXPECT_EQ(note.find("RED ALERT"), std::string::npos) << where << ": " << note;
}

}  // namespace

TEST(TheoremSettle, RedAlertOnlyWhenPremisesHold) {
  CheckReport holds, violated;
  violated.verdict = Verdict::Violated;
  TheoremVerdict v;
  v.hypotheses = {holds};
  v.conclusion = violated;
  const auto red = settle(v);
  EXPECT_FALSE(red.consistent);
  EXPECT_NE(red.notes.front().find("RED ALERT"), std::string::npos);
  v.hypotheses = {holds, violated};
  const auto vacuous = settle(v);
  EXPECT_TRUE(vacuous.consistent);
  TheoremVerdict parent;
  parent.parts = {red};
  EXPECT_FALSE(settle(parent).consistent);
}

TEST(TheoremAlphaContraction, SsepScenarioPremiseAndConclusionHold) {
  const auto v = validate_alpha_contraction(extra("quad_zero_map"), {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Holds);
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_TRUE(v.consistent);
}

// Conclusion holds on the root example (sqrt is monotone, alpha t <= t for t >= 0) even though SSEP fails.
TEST(TheoremAlphaContraction, RootMap) {
  const auto v = validate_alpha_contraction(worked("root_zero_map"), {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Violated);
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremAlphaContraction, IdentityMapAlphaZeroIsReflexive) {
  SamplePlan p;
  p.alpha_grid = 1;
  const auto sc = extra("sphere");
  const auto tuples = enumerate(p, sc.region).tuples;
  EXPECT_EQ(check_alpha_contraction(sc, tuples).verdict, Verdict::Holds);
  for (const auto& tp : tuples) {
    const auto o = evaluate_tuple(sc, PropertyKind::Ssep, tp);
    if (tp.lambda == 0.0) {
      EXPECT_EQ(o.margin(), 0.0);
    }
  }
}

TEST(TheoremAlphaContraction, PlateauPremiseFails) {
  const auto v = validate_alpha_contraction(worked("plateau_atan"), {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Violated);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremAlphaContraction, QuasiPremiseUsesEqualPoints) {
  const auto v = validate_alpha_contraction(worked("step_ramp"), {}, {}, PropertyKind::Sqsep);
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Holds);
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_EQ(v.conclusion->samples_tested, 9u * 5u);
  EXPECT_THROW(validate_alpha_contraction(worked("step_ramp"), {}, {}, PropertyKind::Sep), Error);
}

// Per-tuple margins are linear in the weights: shared point, linear right-hand side.
TEST(TheoremMargins, LinearCombination) {
  const Scenario parts[] = {extra("quad_zero_map"), extra("abs_zero_map")};
  const double w[] = {2.0, 3.0};
  const auto combined = combine_linear(parts, w);
  for (const auto& tp : tuples_for(combined)) {
    const double m1 = evaluate_tuple(parts[0], PropertyKind::Ssep, tp).margin();
    const double m2 = evaluate_tuple(parts[1], PropertyKind::Ssep, tp).margin();
    const double m = evaluate_tuple(combined, PropertyKind::Ssep, tp).margin();
    ASSERT_NEAR(m, 2 * m1 + 3 * m2, 1e-9) << "tuple #" << tp.index;
  }
}

TEST(TheoremMargins, ComposeScales) {
  const auto sc = extra("quad_zero_map");
  const auto composed = compose_monotone(sc, parse("5*x1", 1));
  for (const auto& tp : tuples_for(sc)) {
    const double m = evaluate_tuple(sc, PropertyKind::Ssep, tp).margin();
    ASSERT_NEAR(evaluate_tuple(composed, PropertyKind::Ssep, tp).margin(), 5 * m, 1e-9) << "tuple #" << tp.index;
  }
}

TEST(TheoremLinear, IdentityWeight) {
  const Scenario parts[] = {worked("root_zero_map")};
  const double w[] = {1.0};
  const auto v = validate_linear(parts, w, {});
  const auto direct = check_pointwise_inequality(parts[0], PropertyKind::Ssep, {});
  EXPECT_EQ(v.conclusion->verdict, direct.verdict);
  EXPECT_EQ(v.conclusion->violations, direct.violations);
  EXPECT_EQ(v.conclusion->witness->tuple.index, direct.witness->tuple.index);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremLinear, PositiveWeightsPreserveSsep) {
  const Scenario parts[] = {extra("quad_zero_map"), extra("abs_zero_map")};
  const double w[] = {2.0, 3.0};
  const auto v = validate_linear(parts, w, {});
  EXPECT_TRUE(all_hold(v.hypotheses));
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremLinear, ZeroWeights) {
  const Scenario parts[] = {worked("root_zero_map"), extra("quad_zero_map")};
  const double w[] = {0.0, 0.0};
  const auto combined = combine_linear(parts, w);
  for (const auto& tp : tuples_for(combined)) ASSERT_EQ(evaluate_tuple(combined, PropertyKind::Ssep, tp).margin(), 0.0);
  EXPECT_EQ(validate_linear(parts, w, {}).conclusion->verdict, Verdict::Holds);
}

TEST(TheoremLinear, RejectsMismatchedInputs) {
  const Scenario parts[] = {worked("root_zero_map"), worked("plateau_atan")};
  const double w[] = {1.0, 1.0};
  EXPECT_THROW(validate_linear(parts, w, {}), Error);
  const double neg[] = {1.0, -1.0};
  const Scenario same[] = {worked("root_zero_map"), extra("quad_zero_map")};
  EXPECT_THROW(validate_linear(same, neg, {}), Error);
  const double one[] = {1.0};
  EXPECT_THROW(validate_linear(same, one, {}), Error);
}

TEST(TheoremSup, SingleFunction) {
  const Scenario parts[] = {extra("abs_zero_map")};
  const auto v = validate_sup(parts, {});
  EXPECT_EQ(v.conclusion->verdict, v.hypotheses[0].verdict);
  EXPECT_EQ(v.conclusion->samples_tested, v.hypotheses[0].samples_tested);
}

// Brute-force re-check: the maximum of two SSEP functions with a shared bundle.
TEST(TheoremSup, MaxOfSsepFunctions) {
  const Scenario parts[] = {extra("quad_zero_map"), extra("const_half")};
  const auto v = validate_sup(parts, {});
  EXPECT_TRUE(all_hold(v.hypotheses));
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  const auto combined = combine_sup(parts);
  auto h = [](double x) { return std::max(x * x, 0.5); };
  for (const auto& tp : tuples_for(combined)) {
    const double a = tp.alpha * tp.s[0], b = tp.alpha * tp.t[0];
    const double p = b + tp.lambda * (a != b ? -b : 0.0);
    const auto o = evaluate_tuple(combined, PropertyKind::Ssep, tp);
    ASSERT_DOUBLE_EQ(o.lhs, h(p));
    ASSERT_DOUBLE_EQ(o.rhs, tp.lambda * h(tp.s[0]) + (1 - tp.lambda) * h(tp.t[0]));
  }
}

TEST(TheoremSup, FailingMemberIsVacuous) {
  const Scenario parts[] = {worked("root_zero_map"), extra("const_half")};
  const auto v = validate_sup(parts, {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Violated);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremSup, DifferentBundlesRejected) {
  const Scenario parts[] = {worked("root_zero_map"), worked("plateau_atan")};
  try {
    validate_sup(parts, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("differs in E"), std::string::npos) << e.what();
  }
}

TEST(TheoremCompose, DoublingDoublesMargins) {
  const auto sc = extra("abs_zero_map");
  const auto v = validate_compose(sc, parse("2*x1", 1), {});
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  const auto composed = compose_monotone(sc, parse("2*x1", 1));
  for (const auto& tp : tuples_for(sc))
    ASSERT_NEAR(evaluate_tuple(composed, PropertyKind::Ssep, tp).margin(),
                2 * evaluate_tuple(sc, PropertyKind::Ssep, tp).margin(), 1e-12);
}

TEST(TheoremCompose, PositivePart) {
  const auto g = parse("max(x1, 0)", 1);
  const auto on_abs = validate_compose(extra("abs_zero_map"), g, {});
  EXPECT_EQ(on_abs.conclusion->verdict, Verdict::Holds);
  EXPECT_TRUE(on_abs.consistent);
  const auto on_root = validate_compose(worked("root_zero_map"), g, {});
  EXPECT_TRUE(on_root.consistent);
  // h >= 0 there, so g(h) = h and the verdicts coincide
  EXPECT_EQ(on_root.conclusion->verdict, on_root.hypotheses[0].verdict);
}

TEST(TheoremCompose, ScreenRejectsShiftAndDecrease) {
  try {
    screen_monotone(parse("x1 + 1", 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("g(2*1) = 3 but 2*g(1) = 4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(screen_monotone(parse("-x1", 1)), Error);
  EXPECT_THROW(screen_monotone(parse("x1^2", 1)), Error);
  EXPECT_THROW(screen_monotone(parse("x1 + x2", 2)), Error);
  EXPECT_NO_THROW(screen_monotone(parse("if x1 > 0 then 3*x1 else 0.5*x1", 1)));
}

TEST(TheoremBridge, RootMapAgreesAndDominates) {
  const auto sc = worked("root_zero_map");
  const auto v = validate_sep_ssep_bridge(sc, {});
  ASSERT_EQ(v.hypotheses.size(), 3u);
  EXPECT_EQ(v.hypotheses[1].verdict, Verdict::Holds);  // h(0) = 0 <= h(t)
  EXPECT_EQ(v.hypotheses[0].verdict, v.hypotheses[2].verdict);
  EXPECT_TRUE(v.consistent);
  ASSERT_EQ(v.parts.size(), 2u);
  EXPECT_EQ(v.parts[0].id, "bridge/forward");
  EXPECT_EQ(v.parts[1].id, "bridge/converse");
}

TEST(TheoremBridge, IdentityMapMakesSepAndSsepIdentical) {
  const auto sc = extra("sphere");
  const auto tuples = tuples_for(sc);
  for (const auto& tp : tuples) {
    const auto a = evaluate_tuple(sc, PropertyKind::Sep, tp);
    const auto b = evaluate_tuple(sc, PropertyKind::Ssep, tp);
    ASSERT_EQ(a.lhs, b.lhs);
    ASSERT_EQ(a.rhs, b.rhs);
  }
  const auto v = validate_sep_ssep_bridge(sc, {});
  EXPECT_EQ(v.hypotheses[1].verdict, Verdict::Holds);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremBridge, BothSidesFailing) {
  const auto v = validate_sep_ssep_bridge(extra("neg_linear_const_map"), {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Holds);
  EXPECT_EQ(v.hypotheses[1].verdict, Verdict::Violated);
  EXPECT_EQ(v.hypotheses[2].verdict, Verdict::Violated);
  EXPECT_TRUE(v.consistent);
  EXPECT_FALSE(all_hold(v.parts[1].hypotheses));
}

// SSEP holds while SEP fails: the two directions are reported separately
TEST(TheoremBridge, DirectionsRecordedSeparately) {
  const auto v = validate_sep_ssep_bridge(extra("quad_zero_map"), {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Violated);
  EXPECT_EQ(v.hypotheses[2].verdict, Verdict::Holds);
  EXPECT_TRUE(v.consistent);
  bool noted = false;
  for (const auto& n : v.notes) noted |= n.find("directions recorded separately") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(TheoremSpsep, SsepScenarioGivesSpsep) {
  const auto v = validate_ssep_implies_spsep(extra("quad_zero_map"), {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Holds);
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
}

TEST(TheoremSpsep, WorkedScenariosConsistent) {
  for (const char* n : {"root_zero_map", "plateau_atan"}) {
    const auto v = validate_ssep_implies_spsep(worked(n), {});
    EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Violated) << n;
    EXPECT_TRUE(v.consistent) << n;
  }
}

TEST(TheoremSpsep, ConstantIsVacuous) {
  const auto v = validate_ssep_implies_spsep(extra("const_half"), {});
  EXPECT_EQ(v.conclusion->samples_tested, 0u);
  EXPECT_EQ(v.conclusion->violations, 0u);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremSqsep, OrderedTuplesOnly) {
  const auto sc = extra("quad_zero_map");
  const auto v = validate_ssep_implies_sqsep(sc, {});
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_LT(v.conclusion->samples_tested, v.hypotheses[0].samples_tested);
}

TEST(TheoremQuasiBridge, StepRamp) {
  const auto v = validate_quasi_bridge(worked("step_ramp"), {});
  EXPECT_EQ(v.hypotheses[0].verdict, Verdict::Violated);
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremLevelSets, SsepScenario) {
  const auto v = validate_level_sets(extra("quad_zero_map"), {});
  EXPECT_TRUE(all_hold(v.hypotheses));
  ASSERT_FALSE(v.parts.empty());
  for (const auto& p : v.parts) EXPECT_NE(p.conclusion->verdict, Verdict::Violated);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremEpigraph, BothDirections) {
  const auto v = validate_epigraph(worked("plateau_atan"), {});
  ASSERT_EQ(v.parts.size(), 2u);
  EXPECT_EQ(v.parts[0].hypotheses[0].verdict, Verdict::Violated);
  EXPECT_EQ(v.parts[1].hypotheses[0].verdict, Verdict::Violated);
  EXPECT_TRUE(v.consistent);
  const auto ok = validate_epigraph(extra("quad_zero_map"), {});
  EXPECT_EQ(ok.parts[0].conclusion->verdict, Verdict::Holds);
  EXPECT_EQ(ok.parts[1].conclusion->verdict, Verdict::Holds);
}

// X = [-5, 5]; P = alpha t (1 - lambda) stays there.
TEST(TheoremFeasible, BoxConstraints) {
  const auto sc = extra("root_constrained");
  const auto v = validate_feasible_set_sei(sc, {});
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_EQ(v.hypotheses.size(), 2u);
  EXPECT_TRUE(v.consistent);
  const auto x = feasible_region(sc);
  for (double t : {-5.0, -1.0, 2.0, 5.0})
    for (double a : {0.0, 0.5, 1.0})
      for (double l : {0.0, 0.5, 1.0}) EXPECT_TRUE(member(x, Point{a * t * (1 - l)}, 0.0));
}

// Root function as its own constraint: X = [-5, 0].
TEST(TheoremFeasible, NonpositiveHalfLine) {
  const auto sc = extra("root_nonpositive");
  const auto x = feasible_region(sc);
  EXPECT_TRUE(member(x, Point{-5.0}, 0.0));
  EXPECT_TRUE(member(x, Point{0.0}, 0.0));
  EXPECT_FALSE(member(x, Point{0.25}, 0.0));
  const auto v = validate_feasible_set_sei(sc, {});
  EXPECT_EQ(v.conclusion->verdict, Verdict::Holds);
  EXPECT_GT(v.conclusion->skipped.membership_failure, 0u);
  EXPECT_TRUE(v.consistent);
}

TEST(TheoremFeasible, EmptyFeasibleSetStarves) {
  EXPECT_THROW(validate_feasible_set_sei(extra("infeasible"), {}), SamplingStarved);
  EXPECT_THROW(validate_feasible_set_sei(worked("root_zero_map"), {}), Error);
}

// No validator may report premises holding with the conclusion violated.
TEST(TheoremProperty, NoRedAlertAcrossCorpus) {
  const SamplePlan plan;
  for (const auto& [name, sc] : corpus()) {
    expect_consistent(validate_alpha_contraction(sc, plan), name);
    expect_consistent(validate_alpha_contraction(sc, plan, {}, PropertyKind::Sqsep), name);
    expect_consistent(validate_sep_ssep_bridge(sc, plan), name);
    expect_consistent(validate_ssep_implies_spsep(sc, plan), name);
    expect_consistent(validate_ssep_implies_sqsep(sc, plan), name);
    expect_consistent(validate_quasi_bridge(sc, plan), name);
    expect_consistent(validate_level_sets(sc, plan), name);
    expect_consistent(validate_epigraph(sc, plan), name);
    expect_consistent(validate_compose(sc, parse("3*x1", 1), plan), name);
    expect_consistent(validate_compose(sc, parse("max(x1, 0)", 1), plan), name);
    const Scenario self[] = {sc, sc};
    const double w[] = {0.5, 2.0};
    expect_consistent(validate_linear(self, w, plan), name);
    expect_consistent(validate_sup(self, plan), name);
    if (!sc.constraints.empty() && name != "infeasible") expect_consistent(validate_feasible_set_sei(sc, plan), name);
  }
}

TEST(TheoremIds, Listed) {
  const auto& ids = theorem_ids();
  EXPECT_EQ(ids.size(), 11u);
  EXPECT_EQ(ids.front(), "alpha-contraction");
}
