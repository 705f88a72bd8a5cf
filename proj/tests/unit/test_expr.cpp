// SPDX-License-Identifier: MIT
#include <hjj/expr.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

using hjj::DomainError;
using hjj::Expr;
using hjj::Op;
using hjj::ParseError;

TEST(ExprParse, ConstantNode) {
    const Expr e = Expr::parse("0", {"u"});
    EXPECT_EQ(e.node(e.root()).op, Op::Const);
    EXPECT_EQ(e.node(e.root()).value, 0.0);
}

TEST(ExprParse, ProductOfConstantAndTanh) {
    const Expr e = Expr::parse("0.5*tanh(x1)", {"x1"});
    const auto& root = e.node(e.root());
    ASSERT_EQ(root.op, Op::Mul);
    EXPECT_EQ(e.node(root.lhs).op, Op::Const);
    EXPECT_EQ(e.node(root.lhs).value, 0.5);
    const auto& call = e.node(root.rhs);
    ASSERT_EQ(call.op, Op::Tanh);
    EXPECT_EQ(e.node(call.lhs).op, Op::Var);
}

TEST(ExprParse, IncompleteSumFailsAtEnd) {
    try {
        Expr::parse("u +", {"u"});
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
        EXPECT_EQ(e.position(), 3u);
        EXPECT_FALSE(e.expected().empty());
    }
}

TEST(ExprParse, UnknownNames) {
    try {
        Expr::parse("u + y", {"u"});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::UnknownVariable);
        EXPECT_EQ(e.position(), 4u);
    }
    try {
        Expr::parse("sinh(u)", {"u"});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::UnknownFunction);
        EXPECT_EQ(e.position(), 0u);
    }
}

TEST(ExprParse, RejectsMalformedInput) {
    for (const char* bad : {"", "  ", "(u", "u)", "u ^ 1.5", "u^x1", "2u", "u**2", "sin u", "1e", "."}) {
        EXPECT_THROW(Expr::parse(bad, {"u", "x1"}), ParseError) << bad;
    }
}

TEST(ExprParse, Precedence) {
    // ^ binds tighter than unary minus, which binds tighter than * and /.
    EXPECT_DOUBLE_EQ(Expr::parse("-u^2", {"u"}).eval({{"u", 3.0}}), -9.0);
    EXPECT_DOUBLE_EQ(Expr::parse("2*-u", {"u"}).eval({{"u", 3.0}}), -6.0);
    EXPECT_DOUBLE_EQ(Expr::parse("1 - 2 - 3", {}).eval(std::span<const double>{}), -4.0);
    EXPECT_DOUBLE_EQ(Expr::parse("8 / 4 / 2", {}).eval(std::span<const double>{}), 1.0);
    EXPECT_DOUBLE_EQ(Expr::parse("1 + 2*3^2", {}).eval(std::span<const double>{}), 19.0);
    EXPECT_DOUBLE_EQ(Expr::parse("(1 + 2)*3", {}).eval(std::span<const double>{}), 9.0);
    EXPECT_DOUBLE_EQ(Expr::parse("u^-2", {"u"}).eval({{"u", 2.0}}), 0.25);
    EXPECT_DOUBLE_EQ(Expr::parse("+u", {"u"}).eval({{"u", 3.0}}), 3.0);
    EXPECT_DOUBLE_EQ(Expr::parse("2*+u - +1", {"u"}).eval({{"u", 3.0}}), 5.0);
}

TEST(ExprEval, Examples) {
    EXPECT_EQ(Expr::parse("u^2 + sin(x1)", {"u", "x1"}).eval({{"u", 0.0}, {"x1", 0.0}}), 0.0);
    EXPECT_NEAR(Expr::parse("0.5*tanh(x1)", {"x1"}).eval({{"x1", 0.4}}), 0.5 * std::tanh(0.4), 1e-15);
    EXPECT_NEAR(Expr::parse("0.5*tanh(x1)", {"x1"}).eval({{"x1", 0.4}}), 0.189974, 1e-6);
}

TEST(ExprEval, DomainErrorsCarryPosition) {
    const Expr e = Expr::parse("1/x1", {"x1"});
    try {
        e.eval({{"x1", 0.0}});
        FAIL();
    } catch (const DomainError& err) {
        EXPECT_EQ(err.position(), 1u);
    }
    EXPECT_THROW(Expr::parse("log(u)", {"u"}).eval({{"u", 0.0}}), DomainError);
    EXPECT_THROW(Expr::parse("log(u)", {"u"}).eval({{"u", -1.0}}), DomainError);
    EXPECT_THROW(Expr::parse("sqrt(u)", {"u"}).eval({{"u", -1.0}}), DomainError);
    EXPECT_THROW(Expr::parse("u^-1", {"u"}).eval({{"u", 0.0}}), DomainError);
}

TEST(ExprEval, UnboundVariableIsAnError) {
    EXPECT_THROW(Expr::parse("u + x1", {"u", "x1"}).eval({{"u", 1.0}}), hjj::Error);
    // declared but unused variables may stay unbound
    EXPECT_EQ(Expr::parse("u", {"u", "x1"}).eval({{"u", 1.0}}), 1.0);
}

TEST(ExprEvalD, CubeDerivativeMatchesFiniteDifference) {
    const Expr e = Expr::parse("u^3", {"u"});
    const auto [v, d] = e.eval_d({{"u", 2.0}}, "u");
    const double h = 1e-6;
    const double fd = (e.eval({{"u", 2.0 + h}}) - e.eval({{"u", 2.0 - h}})) / (2 * h);
    EXPECT_NEAR(v, 8.0, 1e-12);
    EXPECT_NEAR(d, fd, 1e-6);
    EXPECT_NEAR(d, 12.0, 1e-12);
}

TEST(ExprEvalD, IndependentVariableHasZeroDerivative) {
    const Expr e = Expr::parse("x1", {"u", "x1"});
    const auto [v, d] = e.eval_d({{"u", 0.3}, {"x1", 1.7}}, "u");
    EXPECT_EQ(v, 1.7);
    EXPECT_EQ(d, 0.0);
}

TEST(ExprEvalD, TanhAtZero) {
    const auto [v, d] = Expr::parse("0.5*tanh(x1)", {"x1"}).eval_d({{"x1", 0.0}}, "x1");
    EXPECT_EQ(v, 0.0);
    EXPECT_EQ(d, 0.5);
}

TEST(ExprEvalD, UnknownSeed) {
    EXPECT_THROW(Expr::parse("u", {"u"}).eval_d({{"u", 1.0}}, "x1"), hjj::Error);
}

TEST(ExprEval, Deterministic) {
    const Expr e = Expr::parse("exp(sin(u)*x1) / (1 + abs(u - x1)) + sqrt(x1^2 + 1)", {"u", "x1"});
    const double a = e.eval({{"u", 0.123}, {"x1", -0.77}});
    for (int k = 0; k < 10; ++k) EXPECT_EQ(e.eval({{"u", 0.123}, {"x1", -0.77}}), a);
}

namespace {

// Random expressions over {u, x1} whose functions stay in their domains near the sample box.
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 12);
    std::uniform_real_distribution<double> c(0.1, 2.0);
    switch (pick(rng)) {
    case 0: return "u";
    case 1: return "x1";
    case 2: return std::to_string(c(rng));
    case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 5: return random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1);
    case 6: return random_expr(rng, depth - 1) + " / (2 + cos(" + random_expr(rng, depth - 1) + "))";
    case 7: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 8: return "tanh(" + random_expr(rng, depth - 1) + ")";
    case 9: return "exp(0.3*sin(" + random_expr(rng, depth - 1) + "))";
    case 10: return "log(2 + cos(" + random_expr(rng, depth - 1) + "))";
    case 11: return "sqrt(1 + " + random_expr(rng, depth - 1) + "^2)";
    default: return "-(" + random_expr(rng, depth - 1) + ")^" + std::to_string(std::uniform_int_distribution<int>(1, 3)(rng));
    }
}

}  // namespace

TEST(ExprProperty, DualDerivativeMatchesCentralDifferences) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> point(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const std::string src = random_expr(rng, 4);
        const Expr e = Expr::parse(src, {"u", "x1"});
        const double u = point(rng), x = point(rng);
        for (const char* seed : {"u", "x1"}) {
            const auto [v, d] = e.eval_d({{"u", u}, {"x1", x}}, seed);
            const double h = 1e-5;
            const bool on_u = std::string(seed) == "u";
            const double fp = e.eval({{"u", u + (on_u ? h : 0)}, {"x1", x + (on_u ? 0 : h)}});
            const double fm = e.eval({{"u", u - (on_u ? h : 0)}, {"x1", x - (on_u ? 0 : h)}});
            EXPECT_EQ(v, e.eval({{"u", u}, {"x1", x}})) << src;
            EXPECT_NEAR(d, (fp - fm) / (2 * h), 1e-5 * (1 + std::abs(d))) << src << " d/d" << seed;
        }
    }
}

TEST(ExprProperty, PrintParseRoundTrip) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const Expr e = Expr::parse(random_expr(rng, 5), {"u", "x1"});
        const Expr again = Expr::parse(e.to_string(), {"u", "x1"});
        EXPECT_TRUE(e == again) << e.to_string();
        EXPECT_EQ(again.to_string(), e.to_string());
    }
}

TEST(Dual, ChainAndProductRules) {
    using hjj::Dual;
    const Dual x = Dual::variable(0.7);
    const Dual f = sin(x) * exp(x);
    EXPECT_NEAR(f.deriv, std::cos(0.7) * std::exp(0.7) + std::sin(0.7) * std::exp(0.7), 1e-15);
    const Dual g = tanh(x * x);
    const double s = 1.0 / std::cosh(0.49);
    EXPECT_NEAR(g.deriv, 2 * 0.7 * s * s, 1e-15);
    const Dual q = Dual{1.0} / x;
    EXPECT_NEAR(q.deriv, -1.0 / 0.49, 1e-14);
}
