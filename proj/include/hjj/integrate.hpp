// SPDX-License-Identifier: MIT
/**
    \file
    \brief fixed-step classical Runge-Kutta integration with Hermite dense output

    Steps have fixed length `step`; the last one is shortened so the path lands
    exactly on t1. Integration runs backward when t1 < t0. Nodes are placed at
    t0 + k*step (not accumulated), so identical inputs give bit-identical paths.
*/

#pragma once

#include <hjj/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hjj {

struct OdeSystem {
    std::size_t dimension = 0;
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)> rhs;
    double step_hint = 1e-3;
};

/// Number of steps used to cover |t1 - t0|.
inline std::size_t step_count(double t0, double t1, double step) {
    const double span = std::abs(t1 - t0);
    if (span == 0.0) return 0;
    const double n = std::ceil(span / step - 1e-6);
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

/// Scratch buffers for rk4; reuse across calls to avoid allocation.
struct Rk4Workspace {
    std::vector<double> k1, k2, k3, k4, tmp;

    void resize(std::size_t n) {
        k1.resize(n);
        k2.resize(n);
        k3.resize(n);
        k4.resize(n);
        tmp.resize(n);
    }
};

namespace detail {

inline void check_finite(std::span<const double> y, double t) {
    for (const double v : y)
        if (!std::isfinite(v)) throw IntegrationError("non-finite state", t);
}

/// One RK4 step from (t, y) with k1 = f(t, y) already in ws.k1; y is overwritten.
template <typename Rhs>
void rk4_step(Rhs& rhs, double t, std::span<double> y, double h, Rk4Workspace& ws) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * h * ws.k1[i];
    rhs(t + 0.5 * h, std::span<const double>(ws.tmp.data(), n), std::span<double>(ws.k2.data(), n));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + 0.5 * h * ws.k2[i];
    rhs(t + 0.5 * h, std::span<const double>(ws.tmp.data(), n), std::span<double>(ws.k3.data(), n));
    for (std::size_t i = 0; i < n; ++i) ws.tmp[i] = y[i] + h * ws.k3[i];
    rhs(t + h, std::span<const double>(ws.tmp.data(), n), std::span<double>(ws.k4.data(), n));
    for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
}

}  // namespace detail

/// Advances `y` from t0 to t1 in place. `observe(t, y, dydt)` is called at every
/// node including both ends (dydt evaluated at that node).
template <typename Rhs, typename Observer>
void integrate_in_place(Rhs& rhs, std::span<double> y, double t0, double t1, double step,
                        Rk4Workspace& ws, Observer&& observe) {
    if (!(step > 0.0)) throw Error("integration step must be positive");
    const std::size_t n = y.size();
    ws.resize(n);
    const std::size_t steps = step_count(t0, t1, step);
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    std::span<double> k1(ws.k1.data(), n);

    double t = t0;
    rhs(t, std::span<const double>(y), k1);
    observe(t, std::span<const double>(y), std::span<const double>(k1));
    for (std::size_t k = 0; k < steps; ++k) {
        const double next = (k + 1 == steps) ? t1 : t0 + dir * static_cast<double>(k + 1) * step;
        detail::rk4_step(rhs, t, y, next - t, ws);
        t = next;
        detail::check_finite(y, t);
        rhs(t, std::span<const double>(y), k1);
        observe(t, std::span<const double>(y), std::span<const double>(k1));
    }
}

template <typename Rhs>
void integrate_in_place(Rhs& rhs, std::span<double> y, double t0, double t1, double step,
                        Rk4Workspace& ws) {
    if (!(step > 0.0)) throw Error("integration step must be positive");
    const std::size_t n = y.size();
    ws.resize(n);
    const std::size_t steps = step_count(t0, t1, step);
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    std::span<double> k1(ws.k1.data(), n);
    double t = t0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double next = (k + 1 == steps) ? t1 : t0 + dir * static_cast<double>(k + 1) * step;
        rhs(t, std::span<const double>(y), k1);
        detail::rk4_step(rhs, t, y, next - t, ws);
        t = next;
        detail::check_finite(y, t);
    }
}

/// Stored nodes of one integration run, queryable anywhere between its ends.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::size_t dimension) : dim_{dimension} {}

    std::size_t dimension() const noexcept { return dim_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    const std::vector<double>& times() const noexcept { return times_; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }

    std::span<const double> state(std::size_t node) const {
        return {states_.data() + node * dim_, dim_};
    }
    std::span<const double> derivative(std::size_t node) const {
        return {derivs_.data() + node * dim_, dim_};
    }
    std::span<const double> front() const { return state(0); }
    std::span<const double> back() const { return state(size() - 1); }

    void push(double t, std::span<const double> y, std::span<const double> dydt) {
        times_.push_back(t);
        states_.insert(states_.end(), y.begin(), y.end());
        derivs_.insert(derivs_.end(), dydt.begin(), dydt.end());
    }

    bool contains(double t) const {
        if (empty()) return false;
        const double lo = std::min(t_begin(), t_end());
        const double hi = std::max(t_begin(), t_end());
        return t >= lo && t <= hi;
    }

    /// Cubic Hermite interpolation of component `c` at time t; exact at nodes.
    double at(double t, std::size_t c) const {
        if (!contains(t)) throw Error("time outside stored trajectory");
        const std::size_t k = segment(t);
        const double t0 = times_[k];
        if (t == t0) return state(k)[c];
        const double t1 = times_[k + 1];
        if (t == t1) return state(k + 1)[c];
        const double h = t1 - t0;
        const double s = (t - t0) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        return h00 * state(k)[c] + h10 * h * derivative(k)[c] + h01 * state(k + 1)[c] +
               h11 * h * derivative(k + 1)[c];
    }

    std::vector<double> at(double t) const {
        std::vector<double> out(dim_);
        for (std::size_t c = 0; c < dim_; ++c) out[c] = at(t, c);
        return out;
    }

private:
    // index k with t in [times_[k], times_[k+1]] (times may be decreasing)
    std::size_t segment(double t) const {
        if (size() < 2) return 0;
        const bool forward = t_end() >= t_begin();
        std::size_t lo = 0;
        std::size_t hi = size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            const bool before = forward ? times_[mid] <= t : times_[mid] >= t;
            if (before) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return lo;
    }

    std::size_t dim_ = 0;
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<double> derivs_;
};

/// RK4 from (t0, y0) to t1 with fixed `step`, storing every node.
inline Trajectory integrate_path(const OdeSystem& sys, std::span<const double> y0, double t0, double t1,
                                 double step) {
    if (y0.size() != sys.dimension) throw Error("initial state has wrong dimension");
    Trajectory path(sys.dimension);
    std::vector<double> y(y0.begin(), y0.end());
    Rk4Workspace ws;
    auto rhs = sys.rhs;
    integrate_in_place(rhs, std::span<double>(y), t0, t1, step, ws,
                       [&](double t, std::span<const double> state, std::span<const double> d) {
                           path.push(t, state, d);
                       });
    return path;
}

inline Trajectory integrate_path(const OdeSystem& sys, std::span<const double> y0, double t0, double t1) {
    return integrate_path(sys, y0, t0, t1, sys.step_hint);
}

/// Final state only.
inline std::vector<double> integrate_final(const OdeSystem& sys, std::span<const double> y0, double t0,
                                           double t1, double step) {
    if (y0.size() != sys.dimension) throw Error("initial state has wrong dimension");
    std::vector<double> y(y0.begin(), y0.end());
    Rk4Workspace ws;
    auto rhs = sys.rhs;
    integrate_in_place(rhs, std::span<double>(y), t0, t1, step, ws);
    return y;
}

}  // namespace hjj
