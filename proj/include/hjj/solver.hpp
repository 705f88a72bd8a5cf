// SPDX-License-Identifier: MIT
/**
    \file
    \brief the solution u(t,x) = u_hat(t; psi(t,x)) and its numerical checks
*/

#pragma once

#include <hjj/characteristics.hpp>
#include <hjj/hypotheses.hpp>
#include <hjj/inversion.hpp>
#include <hjj/parallel.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hjj {

struct SolutionSample {
    double t = 0.0;
    Point x;
    double u = 0.0;
    Point p;  // d_x u
    std::size_t j = 0;
    Point psi;
    std::size_t iterations = 0;
    double residual = 0.0;
    double modulus = 0.0;
};

inline bool in_closed_ball(const ProblemSpec& spec, const Point& x, double radius) {
    return (x - spec.x_star()).norm() <= radius * (1.0 + 1e-12);
}

inline SolutionSample u_at(const ProblemSpec& spec, double t, const Point& x) {
    if (static_cast<std::size_t>(x.size()) != spec.n()) throw Error("x has wrong dimension");
    if (!in_closed_ball(spec, x, spec.gamma())) throw OutOfDomainError("x outside B(x*, gamma)");
    const auto inv = solve_psi(spec, t, x);
    SolutionSample s;
    s.t = t;
    s.x = x;
    s.u = inv.state.u;
    const Point grad = spec.u0_gradient(ProblemSpec::span(inv.psi));
    s.p = inv.state.s * (inv.dpsi_dx.transpose() * grad);
    s.j = spec.schedule().interval(t);
    s.psi = inv.psi;
    s.iterations = inv.iterations;
    s.residual = inv.residual;
    s.modulus = inv.modulus;
    return s;
}

/// g(x, u) = sum_k alpha_k(u) g_k(x).
inline Point drift(const ProblemSpec& spec, const Point& x, double u) {
    Point g = Point::Zero(x.size());
    for (std::size_t k = 0; k < spec.fields(); ++k) g += spec.alpha_d(k, u).value * spec.gfield_at(k, x);
    return g;
}

/// d_t u + <d_x u, g(x,u)> + L(u) with central differences of u_at. dt shrinks
/// so the stencil stays inside one interval.
inline double hj_residual(const ProblemSpec& spec, double t, const Point& x, double dt = 1e-4, double dx = 1e-4) {
    const auto& sched = spec.schedule();
    const std::size_t j = sched.interval(t);
    const double lo = sched.time(j);
    const double hi = j + 1 < sched.size() ? sched.time(j + 1) : sched.horizon();
    const double room = std::min(t - lo, hi - t);
    if (!(room > 0.0)) throw OutOfDomainError("residual stencil at a jump time");
    dt = std::min(dt, 0.5 * room);
    if (t + dt > sched.horizon()) throw OutOfDomainError("residual stencil past the horizon");
    for (std::size_t i = 0; i < spec.n(); ++i) {
        Point e = Point::Zero(x.size());
        e[static_cast<Eigen::Index>(i)] = dx;
        if (!in_closed_ball(spec, x + e, spec.gamma()) || !in_closed_ball(spec, x - e, spec.gamma()))
            throw OutOfDomainError("residual stencil leaves B(x*, gamma)");
    }
    const double u = u_at(spec, t, x).u;
    const double ut = (u_at(spec, t + dt, x).u - u_at(spec, t - dt, x).u) / (2.0 * dt);
    Point ux(x.size());
    for (std::size_t i = 0; i < spec.n(); ++i) {
        Point e = Point::Zero(x.size());
        e[static_cast<Eigen::Index>(i)] = dx;
        ux[static_cast<Eigen::Index>(i)] = (u_at(spec, t, x + e).u - u_at(spec, t, x - e).u) / (2.0 * dx);
    }
    return ut + ux.dot(drift(spec, x, u)) + spec.L_d(u).value;
}

struct JumpCheck {
    std::size_t j = 0;
    double max_violation = 0.0;
    Point witness;
};

/// max over xs of |u(t_j,x) - u(t_j-,x) - <h(u(t_j-,x)), dy_j>|, with the left
/// limit taken at t_j - 1e-9.
inline JumpCheck check_jump_condition(const ProblemSpec& spec, std::size_t j, const std::vector<Point>& xs) {
    const auto& sched = spec.schedule();
    if (j == 0 || j >= sched.size() || sched.time(j) > sched.horizon()) throw Error("jump index out of range");
    const double tj = sched.time(j);
    const auto& dy = sched.magnitude(j);
    std::vector<double> viol(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        const double before = u_at(spec, tj - 1e-9, xs[i]).u;
        const double after = u_at(spec, tj, xs[i]).u;
        viol[i] = std::abs(after - before - spec.jump_d(before, dy).value);
    });
    JumpCheck out;
    out.j = j;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (viol[i] > out.max_violation || out.witness.size() == 0) {
            out.max_violation = viol[i];
            out.witness = xs[i];
        }
    }
    return out;
}

struct DecayInterval {
    std::size_t j = 0;
    double t = 0.0;
    double sup_u = 0.0;                 // sup |u - u*|
    std::vector<double> sup_grad;       // sup |d_i u|
    double bound_u = 0.0;               // (1/2)^j
    std::vector<double> bound_grad;     // L_i K1 / (1 - rho) (1/2)^j
    Point witness;                      // argmax of |u - u*|
    std::string error;                  // first evaluation failure, if any
    bool passed = false;

    double margin_u() const { return bound_u - sup_u; }
};

struct DecayReport {
    std::vector<DecayInterval> intervals;
    std::vector<double> L;  // L_i
    double K1 = 0.0;
    double rho = 0.0;
    double beta = 0.0;
    bool passed = false;

    const DecayInterval* first_failure() const {
        for (const auto& iv : intervals)
            if (!iv.passed) return &iv;
        return nullptr;
    }
};

struct DecayOptions {
    std::size_t sigma_points = 41;  // sigma_1 samples for two fields
    std::optional<std::size_t> lipschitz_points;  // x-grid per axis for L_i; default numerics.grid.x_points
};

/// Samples u and d_x u at the midpoints of the first J intervals on xs and
/// compares them with (1/2)^j and L_i K1/(1-rho) (1/2)^j.
inline DecayReport verify_decay(const ProblemSpec& spec, const std::vector<Point>& xs, std::size_t J,
                                const DecayOptions& opt = {}) {
    DecayReport rep;
    const Constants c = derive_constants(spec);
    rep.K1 = c.K1;
    rep.rho = c.rho;
    rep.beta = c.beta;
    GridConfig lg = spec.numerics().grid;
    if (opt.lipschitz_points) lg.x_points = *opt.lipschitz_points;
    rep.L = flow_column_bounds(spec, c.beta, ball_grid(spec.x_star(), spec.gamma(), lg), opt.sigma_points);
    const double gain = c.rho < 1.0 ? c.K1 / (1.0 - c.rho) : std::numeric_limits<double>::quiet_NaN();

    const auto& sched = spec.schedule();
    const std::size_t n = spec.n();
    std::vector<std::size_t> js;
    for (std::size_t j = 0; j < J && j + 1 < sched.size(); ++j)
        if (0.5 * (sched.time(j) + sched.time(j + 1)) <= sched.horizon()) js.push_back(j);
    if (js.size() < J) throw Error("schedule horizon covers fewer than the requested intervals");

    struct Cell {
        double du = 0.0;
        std::vector<double> p;
        std::string error;
    };
    std::vector<Cell> cells(js.size() * xs.size());
    parallel_for(cells.size(), [&](std::size_t idx) {
        const std::size_t j = js[idx / xs.size()];
        const Point& x = xs[idx % xs.size()];
        Cell& cell = cells[idx];
        try {
            const auto s = u_at(spec, 0.5 * (sched.time(j) + sched.time(j + 1)), x);
            cell.du = std::abs(s.u - spec.u_star());
            cell.p.resize(n);
            for (std::size_t i = 0; i < n; ++i) cell.p[i] = std::abs(s.p[static_cast<Eigen::Index>(i)]);
        } catch (const Error& e) {
            cell.error = e.what();
        }
    });

    rep.passed = true;
    for (std::size_t r = 0; r < js.size(); ++r) {
        DecayInterval iv;
        iv.j = js[r];
        iv.t = 0.5 * (sched.time(iv.j) + sched.time(iv.j + 1));
        iv.bound_u = std::ldexp(1.0, -static_cast<int>(iv.j));
        iv.sup_grad.assign(n, 0.0);
        iv.bound_grad.resize(n);
        for (std::size_t i = 0; i < n; ++i) iv.bound_grad[i] = rep.L[i] * gain * iv.bound_u;
        for (std::size_t q = 0; q < xs.size(); ++q) {
            const Cell& cell = cells[r * xs.size() + q];
            if (!cell.error.empty()) {
                if (iv.error.empty()) iv.error = cell.error;
                continue;
            }
            if (cell.du > iv.sup_u || iv.witness.size() == 0) {
                iv.sup_u = cell.du;
                iv.witness = xs[q];
            }
            for (std::size_t i = 0; i < n; ++i) iv.sup_grad[i] = std::max(iv.sup_grad[i], cell.p[i]);
        }
        iv.passed = iv.error.empty() && iv.sup_u <= iv.bound_u;
        for (std::size_t i = 0; i < n; ++i) iv.passed = iv.passed && iv.sup_grad[i] <= iv.bound_grad[i];
        rep.passed = rep.passed && iv.passed;
        rep.intervals.push_back(std::move(iv));
    }
    return rep;
}

struct RoundTripReport {
    std::size_t samples = 0;
    double max_lambda_error = 0.0;  // |psi(t, x_hat(t;lambda)) - lambda|
    double max_x_error = 0.0;       // |x_hat(t; psi(t,x)) - x|
    double max_modulus = 0.0;
    double max_step_ratio = 0.0;
};

/// Random points of B(center, radius) (uniform direction, radius ~ r U^{1/n}).
inline std::vector<Point> random_ball_points(const Point& center, double radius, std::size_t count,
                                             std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto n = center.size();
    std::vector<Point> out;
    for (std::size_t k = 0; k < count; ++k) {
        Point d(n);
        for (auto& v : d) v = normal(rng);
        const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
        out.push_back(center + r * d / d.norm());
    }
    return out;
}

/// Both inversion identities at `count` random (t, lambda) and (t, x) pairs with
/// lambda, x in B(x*, gamma/2) and t in [0, t_max].
inline RoundTripReport check_round_trips(const ProblemSpec& spec, std::size_t count, double t_max,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> time(0.0, t_max);
    const auto lambdas = random_ball_points(spec.x_star(), 0.5 * spec.gamma(), count, rng);
    const auto xs = random_ball_points(spec.x_star(), 0.5 * spec.gamma(), count, rng);
    std::vector<double> ts(2 * count);
    for (auto& t : ts) t = time(rng);

    struct Row {
        double lam = 0.0, x = 0.0, modulus = 0.0, ratio = 0.0;
    };
    std::vector<Row> rows(count);
    parallel_for(count, [&](std::size_t k) {
        const Point xh = characteristic_state(spec, lambdas[k], ts[k]).x;
        const auto a = solve_psi(spec, ts[k], xh);
        rows[k].lam = (a.psi - lambdas[k]).norm();
        const auto b = solve_psi(spec, ts[count + k], xs[k]);
        rows[k].x = (characteristic_state(spec, b.psi, ts[count + k]).x - xs[k]).norm();
        rows[k].modulus = std::max(a.modulus, b.modulus);
        rows[k].ratio = std::max(a.max_step_ratio, b.max_step_ratio);
    });
    RoundTripReport rep;
    rep.samples = count;
    for (const auto& r : rows) {
        rep.max_lambda_error = std::max(rep.max_lambda_error, r.lam);
        rep.max_x_error = std::max(rep.max_x_error, r.x);
        rep.max_modulus = std::max(rep.max_modulus, r.modulus);
        rep.max_step_ratio = std::max(rep.max_step_ratio, r.ratio);
    }
    return rep;
}

struct LemmaReport {
    std::size_t paths = 0;
    double jump_growth = 0.0;      // max |u(t_j)-u*| - |u(t_j-)-u*|
    double interval_growth = 0.0;  // max increase of |u-u*| between consecutive nodes
    double initial_excess = 0.0;   // max |u(t)-u*| - |u0(lambda)|
    double sensitivity_excess = 0.0;  // max |d_lambda u| - |grad u0|
    bool sensitivity_checked = false;
    bool passed = false;
};

/// Lemma 1 (|u - u*| non-increasing along characteristics, bounded by |u0|) and
/// Lemma 2 (|d_lambda u| <= |grad u0|) at every stored node of every path.
inline LemmaReport check_lemma_suite(const ProblemSpec& spec, const std::vector<Point>& lambdas, double T,
                                     double tol = 1e-12) {
    std::vector<LemmaReport> part(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t k) {
        const auto path = solve_characteristic(spec, lambdas[k], T);
        LemmaReport& r = part[k];
        const double ustar = spec.u_star();
        const double u0 = std::abs(spec.u0_at(ProblemSpec::span(lambdas[k])));
        const double g0 = path.u0_gradient().norm();
        const auto n = spec.n();
        r.jump_growth = r.interval_growth = r.initial_excess = r.sensitivity_excess =
            -std::numeric_limits<double>::infinity();
        for (const auto& jr : path.jumps())
            r.jump_growth = std::max(r.jump_growth, std::abs(jr.u_after - ustar) - std::abs(jr.u_before - ustar));
        for (const auto& seg : path.segments()) {
            for (std::size_t q = 0; q < seg.size(); ++q) {
                const double du = std::abs(seg.state(q)[n] - ustar);
                r.initial_excess = std::max(r.initial_excess, du - u0);
                if (q > 0) r.interval_growth = std::max(r.interval_growth, du - std::abs(seg.state(q - 1)[n] - ustar));
                if (path.sensitivity_available())
                    r.sensitivity_excess = std::max(r.sensitivity_excess, std::abs(seg.state(q)[n + 1]) * g0 - g0);
            }
        }
    });
    LemmaReport out;
    out.paths = lambdas.size();
    out.sensitivity_checked = !spec.x_dependent();
    out.jump_growth = out.interval_growth = out.initial_excess = out.sensitivity_excess =
        -std::numeric_limits<double>::infinity();
    for (const auto& r : part) {
        out.jump_growth = std::max(out.jump_growth, r.jump_growth);
        out.interval_growth = std::max(out.interval_growth, r.interval_growth);
        out.initial_excess = std::max(out.initial_excess, r.initial_excess);
        out.sensitivity_excess = std::max(out.sensitivity_excess, r.sensitivity_excess);
    }
    out.passed = out.jump_growth <= tol && out.interval_growth <= tol && out.initial_excess <= tol &&
                 (!out.sensitivity_checked || out.sensitivity_excess <= tol);
    return out;
}

}  // namespace hjj
