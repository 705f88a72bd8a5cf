// SPDX-License-Identifier: MIT
/**
    \file
    \brief characteristic curves with jumps

    Along a characteristic started at lambda

        dx/dt = sum_k alpha_k(u) g_k(x),   du/dt = -L(u),   u(0) = u* + u0(lambda)

    and u jumps by <h(u-), dy_j> at every t_j, j >= 1. In the u-only regimes u
    depends on lambda only through u0(lambda), so d_lambda u = s(t) grad u0(lambda)
    with a scalar s:

        ds/dt = -L'(u) s,   s(0) = 1,   s(t_j) = s(t_j-) (1 + <h'(u-), dy_j>).

    tau_k = int alpha_k(u) and its u0-derivative int alpha_k'(u) s are carried
    along as quadrature states.
*/

#pragma once

#include <hjj/integrate.hpp>
#include <hjj/problem.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace hjj {

/// Point of a characteristic. d_lambda u = s * grad u0(lambda), d_lambda tau_k = dtau[k] * grad u0(lambda).
struct CharState {
    double t = 0.0;
    Point x;
    double u = 0.0;
    double s = 1.0;
    std::vector<double> tau;
    std::vector<double> dtau;
};

struct JumpRecord {
    std::size_t j = 0;
    double time = 0.0;
    double u_before = 0.0;
    double u_after = 0.0;
    double s_before = 1.0;
    double s_after = 1.0;
};

namespace detail {

// [x (n), u, s, tau (l), dtau (l)]
struct CharLayout {
    std::size_t n, l;
    std::size_t u() const { return n; }
    std::size_t s() const { return n + 1; }
    std::size_t tau() const { return n + 2; }
    std::size_t dtau() const { return n + 2 + l; }
    std::size_t dim() const { return n + 2 + 2 * l; }
};

inline CharState unpack(const CharLayout& lay, double t, std::span<const double> y) {
    CharState c;
    c.t = t;
    c.x = Eigen::Map<const Point>(y.data(), static_cast<Eigen::Index>(lay.n));
    c.u = y[lay.u()];
    c.s = y[lay.s()];
    c.tau.assign(y.begin() + static_cast<std::ptrdiff_t>(lay.tau()),
                 y.begin() + static_cast<std::ptrdiff_t>(lay.tau() + lay.l));
    c.dtau.assign(y.begin() + static_cast<std::ptrdiff_t>(lay.dtau()),
                  y.begin() + static_cast<std::ptrdiff_t>(lay.dtau() + lay.l));
    return c;
}

inline void check_range(const ProblemSpec& spec, double u, double t) {
    if (!(u >= spec.a() && u <= spec.b())) throw RangeError("characteristic left [a,b]", t, u);
}

}  // namespace detail

/// u- + <h(u-, x), dy>. Throws RangeError when the result leaves [a,b].
inline double apply_jump(const ProblemSpec& spec, double u_minus, const Point& x, const std::vector<double>& dy,
                         double time = std::numeric_limits<double>::quiet_NaN()) {
    if (dy.size() != spec.m()) throw Error("jump magnitude has wrong length");
    for (double v : dy)
        if (!(v >= 0.0)) throw Error("jump magnitudes must be >= 0");
    const auto xs = spec.x_dependent() ? ProblemSpec::span(x) : std::span<const double>{};
    const double u = u_minus + spec.jump_d(u_minus, dy, xs).value;
    detail::check_range(spec, u, time);
    return u;
}

/// Stored characteristic on [0, T]: one dense segment per interval [t_j, min(t_{j+1}, T)].
/// Queries at a jump time return post-jump values; before() gives the left limit.
class CharacteristicPath {
public:
    const Point& lambda() const noexcept { return lambda_; }
    double horizon() const noexcept { return T_; }
    const std::vector<Trajectory>& segments() const noexcept { return segments_; }
    const std::vector<JumpRecord>& jumps() const noexcept { return jumps_; }
    const JumpSchedule& schedule() const noexcept { return schedule_; }

    /// d_lambda u is only tracked when L and h do not depend on x.
    bool sensitivity_available() const noexcept { return sensitivity_; }
    const Point& u0_gradient() const noexcept { return grad_u0_; }

    CharState at(double t) const { return detail::unpack(layout_, t, sample(segment_index(t), t)); }

    CharState before(double t) const {
        const std::size_t j = segment_index(t);
        if (j > 0 && t == schedule_.time(j)) return detail::unpack(layout_, t, sample(j - 1, t));
        return at(t);
    }

    double u(double t) const { return at(t).u; }
    Point x(double t) const { return at(t).x; }

    Point du_dlambda(double t) const {
        if (!sensitivity_) throw Error("d_lambda u is unavailable for x-dependent L or h");
        return at(t).s * grad_u0_;
    }

private:
    friend CharacteristicPath solve_characteristic(const ProblemSpec&, const Point&, double);

    std::size_t segment_index(double t) const {
        if (!(t >= 0.0 && t <= T_)) throw Error("time outside the solved characteristic");
        return std::min(schedule_.interval(t), segments_.size() - 1);
    }

    std::vector<double> sample(std::size_t j, double t) const { return segments_[j].at(t); }

    Point lambda_;
    double T_ = 0.0;
    detail::CharLayout layout_{0, 0};
    JumpSchedule schedule_;
    std::vector<Trajectory> segments_;
    std::vector<JumpRecord> jumps_;
    Point grad_u0_;
    bool sensitivity_ = true;
};

namespace detail {

// Integrates the characteristic from 0 to T. `keep_final_jump` = false stops at
// the left limit when T is a jump time. `sink(j, t, y, dydt)` sees every node.
template <typename Sink>
std::vector<double> run_characteristic(const ProblemSpec& spec, const Point& lambda, double T, bool keep_final_jump,
                                       std::vector<JumpRecord>* jumps, Sink&& sink) {
    if (static_cast<std::size_t>(lambda.size()) != spec.n()) throw Error("lambda has wrong dimension");
    if (!lambda.allFinite()) throw Error("lambda is not finite");
    const auto& sched = spec.schedule();
    if (!(T >= 0.0 && T <= sched.horizon())) throw Error("characteristic time outside [0, horizon]");

    const CharLayout lay{spec.n(), spec.fields()};
    const std::size_t n = lay.n;
    const bool xdep = spec.x_dependent();
    std::vector<double> y(lay.dim(), 0.0);
    std::copy(lambda.data(), lambda.data() + n, y.begin());
    y[lay.u()] = spec.u_star() + spec.u0_at(ProblemSpec::span(lambda));
    y[lay.s()] = 1.0;
    check_range(spec, y[lay.u()], 0.0);

    std::vector<double> g(n);
    auto rhs = [&](double, std::span<const double> s, std::span<double> d) {
        const auto x = s.first(n);
        const double u = s[lay.u()];
        for (std::size_t i = 0; i < n; ++i) d[i] = 0.0;
        for (std::size_t k = 0; k < lay.l; ++k) {
            const Dual a = spec.alpha_d(k, u);
            spec.gfield_at(k, x, std::span<double>(g));
            for (std::size_t i = 0; i < n; ++i) d[i] += a.value * g[i];
            d[lay.tau() + k] = a.value;
            d[lay.dtau() + k] = a.deriv * s[lay.s()];
        }
        const Dual L = spec.L_d(u, xdep ? x : std::span<const double>{});
        d[lay.u()] = -L.value;
        d[lay.s()] = -L.deriv * s[lay.s()];
    };

    Rk4Workspace ws;
    const double step = spec.step();
    for (std::size_t j = 0;; ++j) {
        const double t0 = sched.time(j);
        const double t1 = std::min(sched.time(j + 1), T);
        integrate_in_place(rhs, std::span<double>(y), t0, t1, step, ws,
                           [&](double t, std::span<const double> state, std::span<const double> dydt) {
                               check_range(spec, state[lay.u()], t);
                               sink(j, t, state, dydt);
                           });
        const double tj = sched.time(j + 1);
        if (tj > T || (tj == T && !keep_final_jump)) break;

        JumpRecord rec;
        rec.j = j + 1;
        rec.time = tj;
        rec.u_before = y[lay.u()];
        rec.s_before = y[lay.s()];
        const Point x = Eigen::Map<const Point>(y.data(), static_cast<Eigen::Index>(n));
        const auto& dy = sched.magnitude(j + 1);
        const auto xs = xdep ? ProblemSpec::span(x) : std::span<const double>{};
        y[lay.u()] = apply_jump(spec, rec.u_before, x, dy, tj);
        y[lay.s()] *= 1.0 + spec.jump_d(rec.u_before, dy, xs).deriv;
        rec.u_after = y[lay.u()];
        rec.s_after = y[lay.s()];
        if (jumps) jumps->push_back(rec);

        if (tj == T) {
            std::vector<double> d(lay.dim());
            rhs(T, std::span<const double>(y), std::span<double>(d));
            sink(j + 1, T, std::span<const double>(y), std::span<const double>(d));
            break;
        }
    }
    return y;
}

}  // namespace detail

/// Characteristic from lambda on [0, T], stored densely.
inline CharacteristicPath solve_characteristic(const ProblemSpec& spec, const Point& lambda, double T) {
    CharacteristicPath path;
    path.lambda_ = lambda;
    path.T_ = T;
    path.layout_ = detail::CharLayout{spec.n(), spec.fields()};
    path.schedule_ = spec.schedule();
    path.sensitivity_ = !spec.x_dependent();
    const std::size_t dim = path.layout_.dim();
    detail::run_characteristic(spec, lambda, T, true, &path.jumps_,
                               [&](std::size_t j, double t, std::span<const double> y, std::span<const double> d) {
                                   while (path.segments_.size() <= j) path.segments_.emplace_back(dim);
                                   path.segments_[j].push(t, y, d);
                               });
    path.grad_u0_ = spec.u0_gradient(ProblemSpec::span(lambda));
    return path;
}

/// State at time t only (post-jump at t_j), without storing the path.
inline CharState characteristic_state(const ProblemSpec& spec, const Point& lambda, double t) {
    const auto y = detail::run_characteristic(spec, lambda, t, true, nullptr,
                                              [](std::size_t, double, std::span<const double>, std::span<const double>) {});
    return detail::unpack(detail::CharLayout{spec.n(), spec.fields()}, t, y);
}

/// Left limit at t (differs from characteristic_state only when t is a jump time).
inline CharState characteristic_state_before(const ProblemSpec& spec, const Point& lambda, double t) {
    const auto y = detail::run_characteristic(spec, lambda, t, false, nullptr,
                                              [](std::size_t, double, std::span<const double>, std::span<const double>) {});
    return detail::unpack(detail::CharLayout{spec.n(), spec.fields()}, t, y);
}

}  // namespace hjj
