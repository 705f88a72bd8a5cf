// SPDX-License-Identifier: MIT
// Problem builders and closed-form oracles shared by the test suites.
#pragma once

#include <hjj/problem.hpp>
#include <hjj/problem_file.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

namespace hjj::test {

inline std::string problem_path(const std::string& name) { return std::string(HJJ_PROBLEMS_DIR) + "/" + name; }

/// n = 1, L = u, alpha = u, g = x1, h = -u, u0 = 0.5 tanh(x1), t_j = 0.5 j.
inline ProblemDefinition problem_a_definition(double dy = 0.75) {
    ProblemDefinition d;
    d.name = "problem-a";
    d.regime = Regime::Theorem1;
    d.n = 1;
    d.m = 1;
    d.u_star = 0.0;
    d.x_star = {0.0};
    d.gamma = 1.0;
    d.L = "u";
    d.alphas = {"u"};
    d.gfields = {{"x1"}};
    d.h = {"-u"};
    d.u0 = "0.5*tanh(x1)";
    d.schedule.mode = ScheduleDefinition::Mode::Periodic;
    d.schedule.period = 0.5;
    d.schedule.deltas = {{dy}};
    d.schedule.horizon = 10.0;
    return d;
}

inline ProblemSpec problem_a(double dy = 0.75) { return ProblemSpec(problem_a_definition(dy)); }

inline ProblemDefinition two_field_definition(std::vector<std::string> alphas, std::vector<std::vector<std::string>> g,
                                              std::string u0, double gamma, double period) {
    ProblemDefinition d;
    d.name = "two-field";
    d.regime = Regime::Theorem2;
    d.n = 2;
    d.m = 1;
    d.x_star = {0.0, 0.0};
    d.gamma = gamma;
    d.L = "u";
    d.alphas = std::move(alphas);
    d.gfields = std::move(g);
    d.h = {"-u"};
    d.u0 = std::move(u0);
    d.schedule.period = period;
    d.schedule.deltas = {{0.75}};
    d.schedule.horizon = 20 * period;
    d.numerics.grid.x_points = 21;
    return d;
}

inline ProblemSpec translations() {
    return ProblemSpec(two_field_definition({"0.1*u", "0.05*u^2"}, {{"1", "0"}, {"0", "1"}}, "0.5*tanh(x1 + x2)", 1.0, 0.5));
}

inline ProblemSpec rotation_scaling() {
    return ProblemSpec(two_field_definition({"u", "u^2"}, {{"-x2", "x1"}, {"x1", "x2"}}, "0.5*tanh(x1 - x2)", 0.5, 0.01));
}

/// Closed forms for Problem A with jump factor q = 1 - dy:
///   u_hat(t) = u0(lambda) e^{-t} q^{j(t)},  tau(t) = u0(lambda) c(t),  x_hat(t) = lambda e^{tau(t)}.
struct ProblemAOracle {
    double period = 0.5;
    double q = 0.25;

    static double u0(double x) { return 0.5 * std::tanh(x); }
    static double du0(double x) { const double c = std::cosh(x); return 0.5 / (c * c); }

    int interval(double t) const { return static_cast<int>(std::floor(t / period + 1e-12)); }

    double decay(double t) const { return std::exp(-t) * std::pow(q, interval(t)); }

    /// c(t) = int_0^t e^{-s} q^{j(s)} ds.
    double c(double t) const {
        double s = 0.0;
        const int J = interval(t);
        for (int i = 0; i < J; ++i) s += std::pow(q, i) * (std::exp(-i * period) - std::exp(-(i + 1) * period));
        return s + std::pow(q, J) * (std::exp(-J * period) - std::exp(-t));
    }

    double u_hat(double lambda, double t) const { return u0(lambda) * decay(t); }
    double tau(double lambda, double t) const { return u0(lambda) * c(t); }
    double x_hat(double lambda, double t) const { return lambda * std::exp(tau(lambda, t)); }

    /// psi(t, x): root of lambda e^{u0(lambda) c(t)} = x by bisection (the map is increasing).
    double psi(double t, double x) const {
        double lo = -4.0, hi = 4.0;
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            (x_hat(mid, t) < x ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double u(double t, double x) const { return u_hat(psi(t, x), t); }
};


/// Random u-only spec in the weak-window regime: L' >= 0, h' <= 0, -1 <= h' dy <= 0,
/// random explicit jump times. Used by the Lemma 1 / Lemma 2 suites.
inline ProblemSpec random_weak_spec(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto r = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
    auto s = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    ProblemDefinition d;
    d.name = "random-weak";
    d.regime = Regime::Lemma3StrongL;
    d.n = U(rng) < 0.5 ? 1 : 2;
    d.m = 2;
    d.u_star = std::round(r(-0.5, 0.5) * 1e6) / 1e6;
    d.x_star.assign(d.n, 0.0);
    d.gamma = 1.0;
    const std::string v = "(u - " + s(d.u_star) + ")";
    d.L = s(r(0.2, 2.0)) + "*" + v + " + " + s(r(0.0, 0.5)) + "*" + v + "^3";
    d.alphas = {s(r(-1.0, 1.0)) + "*" + v + " + " + s(r(-0.5, 0.5)) + "*" + v + "^2"};
    if (d.n == 1) {
        d.gfields = {{s(r(-1.0, 1.0)) + "*x1 + " + s(r(-0.5, 0.5))}};
        d.u0 = s(r(0.1, 0.9)) + "*tanh(" + s(r(-3.0, 3.0)) + "*x1 + " + s(r(-1.0, 1.0)) + ")";
    } else {
        d.gfields = {{"-x2 + " + s(r(-0.5, 0.5)) + "*x1", "x1"}};
        d.u0 = s(r(0.1, 0.9)) + "*tanh(" + s(r(-3.0, 3.0)) + "*x1 - " + s(r(-3.0, 3.0)) + "*x2)";
    }
    // h_i = -k_i v - c_i v^3, |h_i'| <= k_i + 3 c_i on [a,b]; keep <h', dy> >= -1.
    const double k1 = r(0.0, 0.8), c1 = r(0.0, 0.05), k2 = r(0.0, 0.8), c2 = r(0.0, 0.05);
    d.h = {"-" + s(k1) + "*" + v + " - " + s(c1) + "*" + v + "^3", "-" + s(k2) + "*" + v + " - " + s(c2) + "*" + v + "^3"};
    const double w1 = k1 + 3 * c1, w2 = k2 + 3 * c2;
    d.schedule.mode = ScheduleDefinition::Mode::Explicit;
    d.schedule.horizon = 3.0;
    double t = 0.0;
    d.schedule.times = {0.0};
    while (t < d.schedule.horizon) {
        t += r(0.05, 0.6);
        d.schedule.times.push_back(t);
        const double a = U(rng), b = U(rng);
        const double scale = 0.999 / std::max(1e-12, a * w1 + b * w2);
        d.schedule.deltas.push_back({std::min(1.0, scale) * a, std::min(1.0, scale) * b});
    }
    d.numerics.grid.x_points = 11;
    return ProblemSpec(d);
}

}  // namespace hjj::test
