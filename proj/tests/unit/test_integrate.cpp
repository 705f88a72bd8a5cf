// SPDX-License-Identifier: MIT
#include <hjj/integrate.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace hjj;

namespace {

OdeSystem linear(double rate) {
    return OdeSystem{1, [rate](double, std::span<const double> y, std::span<double> d) { d[0] = rate * y[0]; }, 0.01};
}

double exp_error(double step) {
    const double y0[1] = {1.0};
    return std::abs(integrate_final(linear(1.0), y0, 0.0, 1.0, step)[0] - std::exp(1.0));
}

}  // namespace

TEST(Integrate, ZeroFieldKeepsConstant) {
    const OdeSystem zero{1, [](double, std::span<const double>, std::span<double> d) { d[0] = 0.0; }, 0.1};
    const double y0[1] = {5.0};
    const auto path = integrate_path(zero, y0, 0.0, 3.7);
    for (std::size_t k = 0; k < path.size(); ++k) EXPECT_EQ(path.state(k)[0], 5.0);
    EXPECT_EQ(path.at(1.234, 0), 5.0);
}

TEST(Integrate, Exponentials) {
    const double y0[1] = {1.0};
    EXPECT_NEAR(integrate_final(linear(1.0), y0, 0.0, 1.0, 0.01)[0], std::exp(1.0), 1e-8);
    EXPECT_NEAR(integrate_final(linear(1.0), y0, 0.0, 1.0, 0.01)[0], 2.718282, 1e-6);
    EXPECT_NEAR(integrate_final(linear(-1.0), y0, 0.0, 1.0, 0.01)[0], std::exp(-1.0), 1e-8);
}

TEST(Integrate, FourthOrderConvergence) {
    for (double h : {0.1, 0.05, 0.02}) EXPECT_GE(exp_error(h) / exp_error(h / 2), 8.0) << h;
}

TEST(Integrate, LandsExactlyOnEndpoint) {
    const double y0[1] = {1.0};
    const auto path = integrate_path(linear(1.0), y0, 0.0, 0.1234, 0.01);
    EXPECT_EQ(path.t_end(), 0.1234);
    EXPECT_EQ(path.size(), 14u);  // 12 full steps + shortened last step + start node
    EXPECT_EQ(step_count(0.0, 1.0, 0.1), 10u);
    EXPECT_EQ(step_count(0.0, 0.0, 0.1), 0u);
}

TEST(Integrate, TimeReversal) {
    for (double rate : {1.0, -1.0, 0.3}) {
        const double y0[1] = {1.0};
        const auto fwd = integrate_final(linear(rate), y0, 0.0, 1.0, 0.01);
        const auto back = integrate_final(linear(rate), fwd, 1.0, 0.0, 0.01);
        EXPECT_NEAR(back[0], 1.0, 1e-9);
    }
}

TEST(Integrate, HermiteDenseOutput) {
    const double y0[1] = {1.0};
    const auto path = integrate_path(linear(1.0), y0, 0.0, 1.0, 0.01);
    for (double t : {0.0, 0.005, 0.333, 0.5, 0.999, 1.0}) EXPECT_NEAR(path.at(t, 0), std::exp(t), 1e-9) << t;
    EXPECT_EQ(path.at(path.times()[37], 0), path.state(37)[0]);
    EXPECT_THROW(path.at(1.01, 0), Error);
}

TEST(Integrate, BackwardDenseOutput) {
    const double y0[1] = {1.0};
    const auto path = integrate_path(linear(1.0), y0, 0.0, -1.0, 0.01);
    EXPECT_NEAR(path.at(-0.4567, 0), std::exp(-0.4567), 1e-9);
}

TEST(Integrate, BlowUpReportsTime) {
    const OdeSystem blow{1, [](double, std::span<const double> y, std::span<double> d) { d[0] = y[0] * y[0]; }, 0.01};
    const double y0[1] = {1.0};
    try {
        integrate_final(blow, y0, 0.0, 2.0, 0.01);
        FAIL() << "expected blow-up";
    } catch (const IntegrationError& e) {
        EXPECT_GT(e.time(), 0.9);
        EXPECT_LE(e.time(), 2.0);
    }
}

TEST(Integrate, BitReproducible) {
    const OdeSystem osc{2,
                        [](double t, std::span<const double> y, std::span<double> d) {
                            d[0] = y[1];
                            d[1] = -y[0] + 0.1 * std::sin(t);
                        },
                        1e-3};
    const double y0[2] = {1.0, 0.0};
    const auto a = integrate_final(osc, y0, 0.0, 3.0, 1e-3);
    const auto b = integrate_final(osc, y0, 0.0, 3.0, 1e-3);
    EXPECT_EQ(a, b);
}

TEST(Integrate, RejectsBadStep) {
    const double y0[1] = {1.0};
    EXPECT_THROW(integrate_final(linear(1.0), y0, 0.0, 1.0, 0.0), Error);
}
