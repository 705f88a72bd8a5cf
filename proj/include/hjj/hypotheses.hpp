// SPDX-License-Identifier: MIT
/**
    \file
    \brief sampled constants and per-regime hypothesis checks

    Maxima are taken over deterministic grids: a u-grid on [a, b] = [u*-1, u*+1]
    and an x-grid on the regime's closed ball (radius 3*gamma for theorem2,
    gamma otherwise). K0 and K1 are suprema over R^n; they are sampled on the
    ball grid plus far-field shells out to 4096*gamma.
*/

#pragma once

#include <hjj/flow.hpp>
#include <hjj/grid.hpp>
#include <hjj/problem.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hjj {

struct Constants {
    double C1 = 0.0;       // max_u sum_k |alpha_k'(u)|
    double C2 = 0.0;       // max_x sum_k |g_k(x)| on the regime ball
    double K0 = 0.0;       // sup |u0|
    double K1 = 0.0;       // sup |grad u0|
    double d = 0.0;        // max jump spacing
    double beta = 0.0;     // 2 d C1
    double rho = 0.0;      // contraction bound for the regime
    double delta = 0.0;    // -max_u sum_i h_i'(u)
    double gamma_L = 0.0;  // min_u L'(u)
    double ball_radius = 0.0;
    std::size_t u_points = 0;
    std::size_t x_samples = 0;
    std::uint64_t lhs_seed = 0;
};

namespace detail {

inline std::vector<double> as_vector(const Point& p) { return {p.data(), p.data() + p.size()}; }

// Calls fn(u, x) over the u-grid, crossed with the x-grid when L and h depend on x.
template <typename Fn>
void for_each_ux(const ProblemSpec& spec, const std::vector<double>& us, const std::vector<Point>& xs, Fn&& fn) {
    if (!spec.x_dependent()) {
        for (double u : us) fn(u, std::span<const double>{}, static_cast<const Point*>(nullptr));
        return;
    }
    for (const auto& x : xs)
        for (double u : us) fn(u, ProblemSpec::span(x), &x);
}

inline double c2_radius(const ProblemSpec& spec) {
    return spec.regime() == Regime::Theorem2 ? 3.0 * spec.gamma() : spec.gamma();
}

}  // namespace detail

inline Constants derive_constants(const ProblemSpec& spec, const GridConfig& grid) {
    Constants c;
    const auto us = linspace(spec.a(), spec.b(), grid.u_points);
    c.ball_radius = detail::c2_radius(spec);
    const auto xs = ball_grid(spec.x_star(), c.ball_radius, grid);
    if (us.empty() || xs.empty()) throw Error("empty sampling grid");
    c.u_points = us.size();
    c.x_samples = xs.size();
    c.lhs_seed = grid.lhs_seed;

    for (double u : us) {
        double s = 0.0;
        for (std::size_t k = 0; k < spec.fields(); ++k) s += std::abs(spec.alpha_d(k, u).deriv);
        c.C1 = std::max(c.C1, s);
    }
    for (const auto& x : xs) {
        double s = 0.0;
        for (std::size_t k = 0; k < spec.fields(); ++k) s += spec.gfield_at(k, x).norm();
        c.C2 = std::max(c.C2, s);
    }
    auto probe_u0 = [&](const Point& x) {
        const auto sx = ProblemSpec::span(x);
        c.K0 = std::max(c.K0, std::abs(spec.u0_at(sx)));
        c.K1 = std::max(c.K1, spec.u0_gradient(sx).norm());
    };
    for (const auto& x : xs) probe_u0(x);
    for (const auto& x : far_field_points(spec.x_star(), spec.gamma())) probe_u0(x);

    double max_hsum = -std::numeric_limits<double>::infinity();
    double min_dL = std::numeric_limits<double>::infinity();
    detail::for_each_ux(spec, us, xs, [&](double u, std::span<const double> x, const Point*) {
        double hs = 0.0;
        for (std::size_t i = 0; i < spec.m(); ++i) hs += spec.h_d(i, u, x).deriv;
        max_hsum = std::max(max_hsum, hs);
        min_dL = std::min(min_dL, spec.L_d(u, x).deriv);
    });
    c.delta = -max_hsum;
    c.gamma_L = min_dL;

    c.d = spec.schedule().spacing();
    c.beta = 2.0 * c.d * c.C1;
    if (spec.regime() == Regime::Lemma3StrongL) {
        c.rho = c.gamma_L > 0.0 ? c.C1 * c.C2 * c.K1 / c.gamma_L : std::numeric_limits<double>::infinity();
    } else {
        c.rho = 2.0 * c.d * c.C1 * c.C2 * c.K1;
    }
    return c;
}

inline Constants derive_constants(const ProblemSpec& spec) { return derive_constants(spec, spec.numerics().grid); }

struct Witness {
    std::optional<double> u;
    std::vector<double> x;
    std::optional<std::size_t> j;
};

struct HypothesisEntry {
    enum class Relation { LessEq, GreaterEq, Less, Greater };

    std::string id;
    std::string description;
    Relation relation = Relation::LessEq;
    double value = 0.0;   // worst sampled value
    double bound = 0.0;
    double margin = 0.0;  // > 0 when satisfied with room, < 0 when violated
    bool passed = false;
    bool identity = false;  // f(u*) = 0 style condition; its margin is always ~0
    Witness witness;
};

struct HypothesisReport {
    Regime regime = Regime::Theorem1;
    std::vector<HypothesisEntry> entries;
    Constants constants;
    std::optional<CommuteCheck> commute;

    bool passed() const {
        for (const auto& e : entries)
            if (!e.passed) return false;
        return true;
    }

    const HypothesisEntry* find(std::string_view id) const {
        for (const auto& e : entries)
            if (e.id == id) return &e;
        return nullptr;
    }

    /// Failed entry with the smallest margin, or else the passed inequality with the smallest margin.
    const HypothesisEntry* tightest() const {
        const HypothesisEntry* best = nullptr;
        auto rank = [](const HypothesisEntry& e) { return e.passed ? (e.identity ? 2 : 1) : 0; };
        for (const auto& e : entries) {
            if (!best || rank(e) < rank(*best) || (rank(e) == rank(*best) && e.margin < best->margin)) best = &e;
        }
        return best;
    }
};

namespace detail {

class ReportBuilder {
public:
    ReportBuilder(HypothesisReport& report, double zero_tol) : report_{report}, tol_{zero_tol} {}

    void add(std::string id, std::string description, HypothesisEntry::Relation rel, double value, double bound,
             Witness w = {}) {
        HypothesisEntry e;
        e.id = std::move(id);
        e.description = std::move(description);
        e.relation = rel;
        e.value = value;
        e.bound = bound;
        e.witness = std::move(w);
        e.identity = e.id.ends_with("_vanishes");
        const double slack = tol_ * std::max(1.0, std::abs(bound));
        using R = HypothesisEntry::Relation;
        switch (rel) {
        case R::LessEq:
            e.margin = bound - value;
            e.passed = value <= bound + slack;
            break;
        case R::GreaterEq:
            e.margin = value - bound;
            e.passed = value >= bound - slack;
            break;
        case R::Less:
            e.margin = bound - value;
            e.passed = value < bound;
            break;
        case R::Greater:
            e.margin = value - bound;
            e.passed = value > bound;
            break;
        }
        if (std::isnan(value)) e.passed = false;
        report_.entries.push_back(std::move(e));
    }

private:
    HypothesisReport& report_;
    double tol_;
};

inline Witness at_u(double u) { return Witness{u, {}, std::nullopt}; }

inline Witness at_ux(double u, const Point* x) {
    Witness w{u, {}, std::nullopt};
    if (x) w.x = as_vector(*x);
    return w;
}

}  // namespace detail

/// Checks every condition of the spec's regime on the sampled grids. Violations
/// are report entries; nothing here throws for a failing condition.
inline HypothesisReport validate_hypotheses(const ProblemSpec& spec, const GridConfig& grid) {
    using R = HypothesisEntry::Relation;
    HypothesisReport report;
    report.regime = spec.regime();
    report.constants = derive_constants(spec, grid);
    const Constants& c = report.constants;
    const double tol = spec.numerics().zero_tol;
    detail::ReportBuilder add(report, tol);

    const Regime regime = spec.regime();
    const bool strong_window =
        regime == Regime::Theorem1 || regime == Regime::Theorem2 || regime == Regime::Lemma4StrongJump;
    const auto us = linspace(spec.a(), spec.b(), grid.u_points);
    const auto xs = ball_grid(spec.x_star(), c.ball_radius, grid);
    const double ustar = spec.u_star();

    // L
    {
        double worst_zero = 0.0;
        Witness wz = detail::at_u(ustar);
        if (spec.x_dependent()) {
            for (const auto& x : xs) {
                const double v = std::abs(spec.L_d(ustar, ProblemSpec::span(x)).value);
                if (v > worst_zero) {
                    worst_zero = v;
                    wz = detail::at_ux(ustar, &x);
                }
            }
        } else {
            worst_zero = std::abs(spec.L_d(ustar).value);
        }
        add.add("L_vanishes", "L(u*) = 0", R::LessEq, worst_zero, 0.0, wz);

        double min_dL = std::numeric_limits<double>::infinity();
        Witness w;
        detail::for_each_ux(spec, us, xs, [&](double u, std::span<const double> x, const Point* p) {
            const double v = spec.L_d(u, x).deriv;
            if (v < min_dL) {
                min_dL = v;
                w = detail::at_ux(u, p);
            }
        });
        if (regime == Regime::Lemma3StrongL) {
            add.add("L_strongly_dissipative", "dL/du >= gamma_L > 0 on [a,b]", R::Greater, min_dL, 0.0, w);
        } else {
            add.add("L_monotone", "dL/du >= 0 on [a,b]", R::GreaterEq, min_dL, 0.0, w);
        }
    }

    // alpha_k, g_k
    if (regime != Regime::Lemma1General) {
        for (std::size_t k = 0; k < spec.fields(); ++k) {
            const std::string tag = "alpha" + std::to_string(k + 1);
            add.add(tag + "_vanishes", tag + "(u*) = 0", R::LessEq, std::abs(spec.alpha_d(k, ustar).value), 0.0,
                    detail::at_u(ustar));
        }
    }
    if (regime == Regime::Theorem1) {
        const double v = spec.gfield_at(0, spec.x_star()).norm();
        add.add("g_vanishes", "g(x*) = 0", R::LessEq, v, 0.0, Witness{std::nullopt, detail::as_vector(spec.x_star()), {}});
    }

    // h_i
    for (std::size_t i = 0; i < spec.m(); ++i) {
        const std::string tag = "h" + std::to_string(i + 1);
        double worst_zero = 0.0;
        Witness wz = detail::at_u(ustar);
        if (spec.x_dependent()) {
            for (const auto& x : xs) {
                const double v = std::abs(spec.h_d(i, ustar, ProblemSpec::span(x)).value);
                if (v > worst_zero) {
                    worst_zero = v;
                    wz = detail::at_ux(ustar, &x);
                }
            }
        } else {
            worst_zero = std::abs(spec.h_d(i, ustar).value);
        }
        add.add(tag + "_vanishes", tag + "(u*) = 0", R::LessEq, worst_zero, 0.0, wz);

        double max_dh = -std::numeric_limits<double>::infinity();
        Witness w;
        detail::for_each_ux(spec, us, xs, [&](double u, std::span<const double> x, const Point* p) {
            const double v = spec.h_d(i, u, x).deriv;
            if (v > max_dh) {
                max_dh = v;
                w = detail::at_ux(u, p);
            }
        });
        add.add(tag + "_monotone", "d" + tag + "/du <= 0 on [a,b]", R::LessEq, max_dh, 0.0, w);
    }
    if (strong_window) {
        add.add("h_sum_strict", "sum_i dh_i/du <= -delta < 0", R::Greater, c.delta, 0.0);
    }

    // u0
    add.add("K0_below_one", "K0 = sup|u0| < 1", R::Less, c.K0, 1.0);
    if (regime == Regime::Theorem2) {
        add.add("u0_vanishes", "u0(x*) = 0", R::LessEq, std::abs(spec.u0_at(ProblemSpec::span(spec.x_star()))), 0.0,
                Witness{std::nullopt, detail::as_vector(spec.x_star()), {}});
    }

    // constant inequalities
    switch (regime) {
    case Regime::Theorem1:
        add.add("rho_bound", "rho = 2 d C1 C2 K1 < 1", R::Less, c.rho, 1.0);
        add.add("flow_radius", "2 d C1 C2 <= gamma", R::LessEq, c.beta * c.C2, spec.gamma());
        break;
    case Regime::Theorem2:
        add.add("rho_bound", "rho = 2 d C1 C2 K1 < 1/2", R::Less, c.rho, 0.5);
        add.add("flow_radius", "beta C2 <= gamma/2", R::LessEq, c.beta * c.C2, 0.5 * spec.gamma());
        break;
    case Regime::Lemma4StrongJump:
        add.add("rho_bound", "rho = 2 d C1 C2 K1 < 1", R::Less, c.rho, 1.0);
        break;
    case Regime::Lemma3StrongL:
        add.add("rho_bound", "rho = C1 C2 K1 / gamma_L < 1", R::Less, c.rho, 1.0);
        break;
    case Regime::Lemma1General:
        break;
    }

    // jump window over all grid u and every scheduled jump
    {
        const auto& sched = spec.schedule();
        double lowest = std::numeric_limits<double>::infinity();
        double highest = -std::numeric_limits<double>::infinity();
        Witness wl, wh;
        for (std::size_t j = 1; j < sched.size(); ++j) {
            const auto& dy = sched.magnitude(j);
            detail::for_each_ux(spec, us, xs, [&](double u, std::span<const double> x, const Point* p) {
                const double v = spec.jump_d(u, dy, x).deriv;
                if (v < lowest) {
                    lowest = v;
                    wl = detail::at_ux(u, p);
                    wl.j = j;
                }
                if (v > highest) {
                    highest = v;
                    wh = detail::at_ux(u, p);
                    wh.j = j;
                }
            });
        }
        add.add("jump_window_lower", "<dh/du, dy_j> >= -1", R::GreaterEq, lowest, -1.0, wl);
        if (strong_window) {
            add.add("jump_window_upper", "<dh/du, dy_j> <= -1/2", R::LessEq, highest, -0.5, wh);
        } else {
            add.add("jump_window_upper", "<dh/du, dy_j> <= 0", R::LessEq, highest, 0.0, wh);
        }
    }

    if (spec.fields() == 2) {
        const auto check = check_commute(spec, 0, 1, spec.x_star(), 3.0 * spec.gamma(), spec.numerics().commute_tol,
                                         c.beta, grid);
        Witness w{std::nullopt, {}, std::nullopt};
        if (check.bracket_witness.size() > 0) w.x = detail::as_vector(check.bracket_witness);
        add.add("fields_commute", "|[g1,g2]| <= commute_tol on B(x*,3 gamma)", R::LessEq, check.max_bracket,
                spec.numerics().commute_tol, w);
        add.add("flows_commute", "flow order gap <= 10 commute_tol", R::LessEq, check.max_order_gap,
                10.0 * spec.numerics().commute_tol);
        report.commute = check;
    }
    return report;
}

inline HypothesisReport validate_hypotheses(const ProblemSpec& spec) {
    return validate_hypotheses(spec, spec.numerics().grid);
}

}  // namespace hjj
