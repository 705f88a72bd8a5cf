// SPDX-License-Identifier: MIT
#include <hjj/hypotheses.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hjj;
using hjj::test::problem_a;
using hjj::test::problem_a_definition;

TEST(JumpSchedule, Periodic) {
    const auto s = JumpSchedule::periodic(0.5, {{0.75}}, 2.0);
    ASSERT_EQ(s.times(), (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
    EXPECT_EQ(s.spacing(), 0.5);
    EXPECT_EQ(s.magnitude(3), std::vector<double>{0.75});
    EXPECT_EQ(s.interval(0.0), 0u);
    EXPECT_EQ(s.interval(0.4999), 0u);
    EXPECT_EQ(s.interval(0.5), 1u);  // right-continuous
    EXPECT_THROW(s.magnitude(0), Error);
}

TEST(JumpSchedule, PeriodicCyclesPattern) {
    const auto s = JumpSchedule::periodic(1.0, {{0.5}, {1.0}}, 3.0);
    EXPECT_EQ(s.magnitude(1)[0], 0.5);
    EXPECT_EQ(s.magnitude(2)[0], 1.0);
    EXPECT_EQ(s.magnitude(3)[0], 0.5);
}

TEST(JumpSchedule, ExplicitValidation) {
    EXPECT_NO_THROW(JumpSchedule::explicit_times({0.0, 0.3, 1.0}, {{0.5}, {0.6}}, 1.0));
    EXPECT_EQ(JumpSchedule::explicit_times({0.0, 0.3, 1.0}, {{0.5}, {0.6}}, 1.0).spacing(), 0.7);
    EXPECT_THROW(JumpSchedule::explicit_times({0.1, 0.3}, {{0.5}}, 0.3), SpecError);        // t0 != 0
    EXPECT_THROW(JumpSchedule::explicit_times({0.0, 0.3, 0.3}, {{0.5}, {0.5}}, 0.3), SpecError);  // not increasing
    EXPECT_THROW(JumpSchedule::explicit_times({0.0, 0.3}, {{-0.5}}, 0.3), SpecError);      // negative jump
    EXPECT_THROW(JumpSchedule::explicit_times({0.0, 0.3}, {{0.5}}, 1.0), SpecError);       // short of horizon
    EXPECT_THROW(JumpSchedule::explicit_times({0.0, 0.3}, {}, 0.3), SpecError);            // missing magnitude
    EXPECT_THROW(JumpSchedule::periodic(0.0, {{0.5}}, 1.0), SpecError);
}

TEST(ProblemSpec, FieldCountPerRegime) {
    auto d = problem_a_definition();
    d.alphas.push_back("u");
    d.gfields.push_back({"1"});
    EXPECT_THROW(ProblemSpec{d}, SpecError);
    d.regime = Regime::Theorem2;
    d.n = 1;
    EXPECT_NO_THROW(ProblemSpec{d});
    d.alphas.pop_back();
    d.gfields.pop_back();
    EXPECT_THROW(ProblemSpec{d}, SpecError);
}

TEST(ProblemSpec, ShapeErrors) {
    auto d = problem_a_definition();
    d.x_star = {0.0, 0.0};
    EXPECT_THROW(ProblemSpec{d}, SpecError);
    d = problem_a_definition();
    d.gfields = {{"x1", "x1"}};
    EXPECT_THROW(ProblemSpec{d}, SpecError);
    d = problem_a_definition();
    d.schedule.deltas = {{0.75, 0.1}};
    EXPECT_THROW(ProblemSpec{d}, SpecError);
    d = problem_a_definition();
    d.gamma = 0.0;
    EXPECT_THROW(ProblemSpec{d}, SpecError);
}

TEST(ProblemSpec, ExpressionVariableSets) {
    auto d = problem_a_definition();
    d.L = "u + x1";  // x only allowed in lemma1-general
    try {
        ProblemSpec s(d);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::UnknownVariable);
        EXPECT_NE(std::string(e.what()).find("L:"), std::string::npos);
    }
    d.regime = Regime::Lemma1General;
    EXPECT_NO_THROW(ProblemSpec{d});
    d = problem_a_definition();
    d.u0 = "u";
    EXPECT_THROW(ProblemSpec{d}, ParseError);
}

TEST(ProblemSpec, DefaultStep) {
    EXPECT_EQ(problem_a().step(), 1e-3);
    auto d = problem_a_definition();
    d.schedule.period = 0.01;
    d.schedule.horizon = 1.0;
    EXPECT_NEAR(ProblemSpec(d).step(), 1e-4, 1e-18);
}

TEST(Constants, ProblemA) {
    const auto c = derive_constants(problem_a());
    // Closed-form maxima: |alpha'| = 1, |g| = |x| <= gamma, sup|0.5 tanh| = 0.5, sup 0.5 sech^2 = 0.5.
    EXPECT_NEAR(c.C1, 1.0, 1e-6);
    EXPECT_NEAR(c.C2, 1.0, 1e-6);
    EXPECT_NEAR(c.K0, 0.5, 1e-6);
    EXPECT_NEAR(c.K1, 0.5, 1e-6);
    EXPECT_NEAR(c.d, 0.5, 1e-12);
    EXPECT_NEAR(c.beta, 1.0, 1e-6);
    EXPECT_NEAR(c.rho, 0.5, 1e-6);
    EXPECT_NEAR(c.delta, 1.0, 1e-12);
    EXPECT_EQ(c.u_points, 1001u);
}

TEST(Constants, ZeroFieldAndZeroData) {
    auto d = problem_a_definition();
    d.alphas = {"0"};
    auto c = derive_constants(ProblemSpec(d));
    EXPECT_EQ(c.C1, 0.0);
    EXPECT_EQ(c.rho, 0.0);
    d = problem_a_definition();
    d.u0 = "0";
    c = derive_constants(ProblemSpec(d));
    EXPECT_EQ(c.K0, 0.0);
    EXPECT_EQ(c.K1, 0.0);
}

TEST(Constants, RefiningTheGridNeverLowersAMaximum) {
    auto d = problem_a_definition();
    d.alphas = {"u + 0.3*sin(3*u)"};
    d.gfields = {{"x1 + 0.2*cos(5*x1)"}};
    d.u0 = "0.4*tanh(2*x1 - 0.3)";
    const ProblemSpec spec(d);
    GridConfig coarse;
    coarse.u_points = 11;
    coarse.x_points = 11;
    GridConfig fine;
    fine.u_points = 101;  // contains the coarse grid
    fine.x_points = 101;
    const auto a = derive_constants(spec, coarse);
    const auto b = derive_constants(spec, fine);
    EXPECT_GE(b.C1 + 1e-12, a.C1);
    EXPECT_GE(b.C2 + 1e-12, a.C2);
    EXPECT_GE(b.K0 + 1e-12, a.K0);
    EXPECT_GE(b.K1 + 1e-12, a.K1);
}

TEST(Constants, ProblemAStableUnderRefinement) {
    const auto spec = problem_a();
    GridConfig fine = spec.numerics().grid;
    fine.u_points = 2001;
    fine.x_points = 81;
    const auto a = derive_constants(spec);
    const auto b = derive_constants(spec, fine);
    EXPECT_NEAR(a.C1, b.C1, 1e-9);
    EXPECT_NEAR(a.C2, b.C2, 1e-9);
    EXPECT_NEAR(a.K0, b.K0, 1e-9);
    EXPECT_NEAR(a.K1, b.K1, 1e-9);
    EXPECT_NEAR(a.rho, b.rho, 1e-9);
}

TEST(Constants, Lemma3Rho) {
    auto d = problem_a_definition();
    d.regime = Regime::Lemma3StrongL;
    d.L = "2*u";
    const auto c = derive_constants(ProblemSpec(d));
    EXPECT_NEAR(c.gamma_L, 2.0, 1e-12);
    EXPECT_NEAR(c.rho, 1.0 * 1.0 * 0.5 / 2.0, 1e-6);
}

TEST(Hypotheses, ProblemAPasses) {
    const auto rep = validate_hypotheses(problem_a());
    EXPECT_TRUE(rep.passed());
    for (const char* id : {"L_vanishes", "L_monotone", "alpha1_vanishes", "g_vanishes", "h1_vanishes", "h1_monotone",
                           "h_sum_strict", "K0_below_one", "rho_bound", "flow_radius", "jump_window_lower",
                           "jump_window_upper"}) {
        const auto* e = rep.find(id);
        ASSERT_NE(e, nullptr) << id;
        EXPECT_TRUE(e->passed) << id;
    }
    EXPECT_NEAR(rep.find("jump_window_upper")->value, -0.75, 1e-12);
    EXPECT_EQ(rep.find("fields_commute"), nullptr);
}

TEST(Hypotheses, FlippedJumpSignFails) {
    auto d = problem_a_definition();
    d.h = {"u"};
    const auto rep = validate_hypotheses(ProblemSpec(d));
    EXPECT_FALSE(rep.passed());
    const auto* e = rep.find("h1_monotone");
    ASSERT_NE(e, nullptr);
    EXPECT_FALSE(e->passed);
    EXPECT_NEAR(e->value, 1.0, 1e-12);
    EXPECT_TRUE(e->witness.u.has_value());
}

TEST(Hypotheses, WeakJumpFailsUpperWindow) {
    const auto rep = validate_hypotheses(problem_a(0.25));
    EXPECT_FALSE(rep.passed());
    const auto* e = rep.find("jump_window_upper");
    ASSERT_NE(e, nullptr);
    EXPECT_FALSE(e->passed);
    EXPECT_NEAR(e->value, -0.25, 1e-12);
    EXPECT_EQ(rep.tightest()->id, "jump_window_upper");
}

TEST(Hypotheses, TightestSkipsIdentities) {
    const auto rep = validate_hypotheses(problem_a());
    ASSERT_TRUE(rep.passed());
    const auto* t = rep.tightest();
    EXPECT_FALSE(t->identity);
    for (const auto& e : rep.entries)
        if (!e.identity) {
            EXPECT_GE(e.margin, t->margin) << e.id;
        }
}

TEST(Hypotheses, TooLargeJumpFailsLowerWindow) {
    const auto rep = validate_hypotheses(problem_a(1.5));
    EXPECT_FALSE(rep.find("jump_window_lower")->passed);
    EXPECT_TRUE(rep.find("jump_window_upper")->passed);
}

TEST(Hypotheses, NonVanishingEquilibriumTerms) {
    auto d = problem_a_definition();
    d.L = "u + 0.1";
    d.alphas = {"u + 0.2"};
    d.gfields = {{"x1 + 0.3"}};
    const auto rep = validate_hypotheses(ProblemSpec(d));
    EXPECT_FALSE(rep.find("L_vanishes")->passed);
    EXPECT_NEAR(rep.find("L_vanishes")->value, 0.1, 1e-12);
    EXPECT_FALSE(rep.find("alpha1_vanishes")->passed);
    EXPECT_FALSE(rep.find("g_vanishes")->passed);
}

TEST(Hypotheses, ContractionConstantsFail) {
    auto d = problem_a_definition();
    d.schedule.period = 1.5;  // rho = 1.5, 2 d C1 C2 = 3 > gamma
    const auto rep = validate_hypotheses(ProblemSpec(d));
    EXPECT_FALSE(rep.find("rho_bound")->passed);
    EXPECT_FALSE(rep.find("flow_radius")->passed);
    EXPECT_NEAR(rep.find("rho_bound")->value, 1.5, 1e-6);
}

TEST(Hypotheses, WeakRegimesUseWeakWindow) {
    auto d = problem_a_definition(0.25);
    d.regime = Regime::Lemma3StrongL;
    const auto rep = validate_hypotheses(ProblemSpec(d));
    EXPECT_TRUE(rep.find("jump_window_upper")->passed);
    EXPECT_NEAR(rep.find("jump_window_upper")->bound, 0.0, 0.0);
    EXPECT_NE(rep.find("L_strongly_dissipative"), nullptr);
    EXPECT_EQ(rep.find("h_sum_strict"), nullptr);
}

TEST(Hypotheses, Lemma3NeedsStrictDissipation) {
    auto d = problem_a_definition();
    d.regime = Regime::Lemma3StrongL;
    d.L = "u^3";
    const auto rep = validate_hypotheses(ProblemSpec(d));
    EXPECT_FALSE(rep.find("L_strongly_dissipative")->passed);
    EXPECT_FALSE(rep.find("rho_bound")->passed);
}

TEST(Hypotheses, Lemma1GeneralSamplesPositions) {
    auto d = problem_a_definition();
    d.regime = Regime::Lemma1General;
    d.L = "(1 + 0.5*sin(x1))*u";
    d.h = {"-(0.5 + 0.25*cos(x1))*u"};
    auto rep = validate_hypotheses(ProblemSpec(d));
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.find("rho_bound"), nullptr);
    d.L = "x1*u";  // negative L' for x1 < 0
    rep = validate_hypotheses(ProblemSpec(d));
    const auto* e = rep.find("L_monotone");
    EXPECT_FALSE(e->passed);
    ASSERT_EQ(e->witness.x.size(), 1u);
    EXPECT_NEAR(e->witness.x[0], -1.0, 1e-12);
}

TEST(Hypotheses, Theorem2Examples) {
    for (const auto& spec : {hjj::test::translations(), hjj::test::rotation_scaling()}) {
        const auto rep = validate_hypotheses(spec);
        EXPECT_TRUE(rep.passed()) << spec.name();
        ASSERT_TRUE(rep.commute.has_value());
        EXPECT_LE(rep.commute->max_bracket, 1e-12);
        EXPECT_NE(rep.find("u0_vanishes"), nullptr);
    }
    const auto c = derive_constants(hjj::test::rotation_scaling());
    EXPECT_NEAR(c.ball_radius, 1.5, 1e-15);
    EXPECT_NEAR(c.C1, 3.0, 1e-9);
    EXPECT_NEAR(c.C2, 3.0, 1e-9);
    EXPECT_NEAR(c.beta, 0.06, 1e-12);
}

TEST(Hypotheses, Theorem2ExamplesHoldAtTenfoldResolution) {
    for (const auto& spec : {hjj::test::translations(), hjj::test::rotation_scaling()}) {
        GridConfig fine = spec.numerics().grid;
        fine.u_points *= 10;
        fine.x_points = 10 * fine.x_points + 1;
        EXPECT_TRUE(validate_hypotheses(spec, fine).passed()) << spec.name();
    }
}

TEST(Hypotheses, ShearPairFailsCommutation) {
    const ProblemSpec spec(hjj::test::two_field_definition({"u", "u"}, {{"x2", "0"}, {"0", "x1"}},
                                                            "0.5*tanh(x1 - x2)", 0.5, 0.01));
    const auto rep = validate_hypotheses(spec);
    EXPECT_FALSE(rep.passed());
    EXPECT_FALSE(rep.find("fields_commute")->passed);
}

TEST(Hypotheses, Theorem2NeedsU0VanishingAtCenter) {
    auto d = hjj::test::two_field_definition({"0.1*u", "0.05*u^2"}, {{"1", "0"}, {"0", "1"}}, "0.1 + 0.3*tanh(x1)",
                                             1.0, 0.5);
    const auto rep = validate_hypotheses(ProblemSpec(d));
    EXPECT_FALSE(rep.find("u0_vanishes")->passed);
}

TEST(Constants, RhoScalesWithSpacing) {
    for (double period : {0.125, 0.25, 0.5}) {
        auto d = problem_a_definition();
        d.schedule.period = period;
        EXPECT_NEAR(derive_constants(ProblemSpec(d)).rho, period, 1e-6);  // rho = 2 d C1 C2 K1 = d
    }
}
