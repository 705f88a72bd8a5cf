// SPDX-License-Identifier: MIT
/**
    \file
    \brief flows of the spatial fields g_k, their Jacobians and Lie brackets

    G_k(s)[x] solves dy/ds = g_k(y), y(0) = x, by RK4 with the problem step.
*/

#pragma once

#include <hjj/grid.hpp>
#include <hjj/integrate.hpp>
#include <hjj/problem.hpp>

#include <random>
#include <vector>

namespace hjj {

/// G_k(sigma)[x]; sigma may be negative. G_k(0)[x] == x exactly.
inline Point flow_map(const ProblemSpec& spec, std::size_t k, double sigma, const Point& x) {
    if (k >= spec.fields()) throw Error("field index out of range");
    if (!x.allFinite()) throw Error("flow base point is not finite");
    Point y = x;
    if (sigma == 0.0) return y;
    auto rhs = [&](double, std::span<const double> s, std::span<double> d) { spec.gfield_at(k, s, d); };
    Rk4Workspace ws;
    integrate_in_place(rhs, std::span<double>(y.data(), static_cast<std::size_t>(y.size())), 0.0, sigma,
                       spec.step(), ws);
    return y;
}

struct FlowWithJacobian {
    Point point;
    Matrix jacobian;
};

namespace detail {

// State [y (n), J column-major (n*n)], dJ/ds = Dg(y) J.
inline void flow_variational(const ProblemSpec& spec, std::size_t k, double sigma, std::vector<double>& state,
                             const std::function<void(double, std::span<const double>)>& observe = {}) {
    const std::size_t n = spec.n();
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix Dg(nn, nn);
    auto rhs = [&](double, std::span<const double> s, std::span<double> d) {
        spec.gfield_at(k, s.first(n), d.first(n));
        spec.gfield_jacobian(k, s.first(n), Dg);
        Eigen::Map<const Matrix> J(s.data() + n, nn, nn);
        Eigen::Map<Matrix> dJ(d.data() + n, nn, nn);
        dJ.noalias() = Dg * J;
    };
    Rk4Workspace ws;
    if (observe) {
        integrate_in_place(rhs, std::span<double>(state), 0.0, sigma, spec.step(), ws,
                           [&](double s, std::span<const double> y, std::span<const double>) { observe(s, y); });
    } else {
        integrate_in_place(rhs, std::span<double>(state), 0.0, sigma, spec.step(), ws);
    }
}

inline std::vector<double> pack(const Point& x, const Matrix& J) {
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<double> state(n + n * n);
    std::copy(x.data(), x.data() + n, state.begin());
    std::copy(J.data(), J.data() + n * n, state.begin() + static_cast<std::ptrdiff_t>(n));
    return state;
}

}  // namespace detail

/// G_k(sigma)[x] together with its spatial Jacobian d G_k(sigma)[x] / dx.
inline FlowWithJacobian flow_with_jacobian(const ProblemSpec& spec, std::size_t k, double sigma, const Point& x) {
    if (k >= spec.fields()) throw Error("field index out of range");
    if (!x.allFinite()) throw Error("flow base point is not finite");
    const auto nn = x.size();
    if (sigma == 0.0) return {x, Matrix::Identity(nn, nn)};
    auto state = detail::pack(x, Matrix::Identity(nn, nn));
    detail::flow_variational(spec, k, sigma, state);
    FlowWithJacobian out;
    out.point = Eigen::Map<const Point>(state.data(), nn);
    out.jacobian = Eigen::Map<const Matrix>(state.data() + nn, nn, nn);
    return out;
}

inline Matrix flow_jacobian(const ProblemSpec& spec, std::size_t k, double sigma, const Point& x) {
    return flow_with_jacobian(spec, k, sigma, x).jacobian;
}

/// [g_k1, g_k2](x) = Dg_k1(x) g_k2(x) - Dg_k2(x) g_k1(x).
inline Point lie_bracket(const ProblemSpec& spec, std::size_t k1, std::size_t k2, const Point& x) {
    return spec.gfield_jacobian(k1, x) * spec.gfield_at(k2, x) - spec.gfield_jacobian(k2, x) * spec.gfield_at(k1, x);
}

struct CommuteCheck {
    bool passed = true;
    double max_bracket = 0.0;
    Point bracket_witness;
    double max_order_gap = 0.0;  // |G1(s) G2(s') x - G2(s') G1(s) x|
    Point order_witness;
    std::size_t samples = 0;
};

/// Samples the closed ball for the bracket and checks that the two flows can be
/// applied in either order (within 10*tol) for random times in [-beta, beta]^2.
inline CommuteCheck check_commute(const ProblemSpec& spec, std::size_t k1, std::size_t k2, const Point& center,
                                  double radius, double tol, double beta, const GridConfig& grid,
                                  std::size_t order_samples = 16) {
    CommuteCheck out;
    if (spec.fields() < 2 || k1 == k2) return out;
    const auto pts = ball_grid(center, radius, grid);
    out.samples = pts.size();
    for (const auto& x : pts) {
        const double v = lie_bracket(spec, k1, k2, x).norm();
        if (v > out.max_bracket || out.bracket_witness.size() == 0) {
            out.max_bracket = v;
            out.bracket_witness = x;
        }
    }
    if (beta > 0.0 && out.max_bracket <= tol) {
        std::mt19937_64 rng(grid.lhs_seed ^ 0xc0ffeeu);
        std::uniform_real_distribution<double> time(-beta, beta);
        std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
        for (std::size_t s = 0; s < order_samples; ++s) {
            const Point& x = pts[pick(rng)];
            const double s1 = time(rng);
            const double s2 = time(rng);
            const Point a = flow_map(spec, k1, s1, flow_map(spec, k2, s2, x));
            const Point b = flow_map(spec, k2, s2, flow_map(spec, k1, s1, x));
            const double gap = (a - b).norm();
            if (gap > out.max_order_gap || out.order_witness.size() == 0) {
                out.max_order_gap = gap;
                out.order_witness = x;
            }
        }
    }
    out.passed = out.max_bracket <= tol && out.max_order_gap <= 10.0 * tol;
    return out;
}

/// max over sigma in [-beta, beta] and x on the ball grid of |column i of d G(sigma)[x]/dx|,
/// for every i. For two fields G = G_2(sigma_2) o G_1(sigma_1) over the sigma square.
inline std::vector<double> flow_column_bounds(const ProblemSpec& spec, double beta, const std::vector<Point>& xs,
                                              std::size_t sigma_points) {
    const std::size_t n = spec.n();
    const auto nn = static_cast<Eigen::Index>(n);
    std::vector<double> bound(n, 0.0);
    auto absorb = [&](std::span<const double> state) {
        Eigen::Map<const Matrix> J(state.data() + n, nn, nn);
        for (std::size_t i = 0; i < n; ++i)
            bound[i] = std::max(bound[i], J.col(static_cast<Eigen::Index>(i)).norm());
    };
    // Sweeping one field over [-beta, beta] from a start state; every RK node is a sample.
    auto sweep = [&](std::size_t k, const std::vector<double>& start) {
        absorb(start);
        if (beta == 0.0) return;
        for (double dir : {1.0, -1.0}) {
            auto state = start;
            detail::flow_variational(spec, k, dir * beta, state,
                                     [&](double, std::span<const double> y) { absorb(y); });
        }
    };
    for (const auto& x : xs) {
        const auto start = detail::pack(x, Matrix::Identity(nn, nn));
        if (spec.fields() == 1) {
            sweep(0, start);
            continue;
        }
        for (const double s1 : linspace(-beta, beta, sigma_points)) {
            auto state = start;
            if (s1 != 0.0) detail::flow_variational(spec, 0, s1, state);
            sweep(1, state);
        }
    }
    return bound;
}

}  // namespace hjj
