// SPDX-License-Identifier: MIT
/**
    \file
    \brief problem instances: jump schedule, numerics and compiled functions

    A problem is the Hamilton-Jacobi equation

        d_t u + <d_x u, g(x,u)> + L(u) = 0          on [t_j, t_{j+1})
        u(t_j, x) = u(t_j-, x) + <h(u(t_j-, x)), dy_j>,   j >= 1
        u(0, x) = u* + u0(x)

    with g(x,u) = sum_k alpha_k(u) g_k(x). In the `lemma1-general` regime L and h
    may also depend on x.
*/

#pragma once

#include <hjj/errors.hpp>
#include <hjj/expr.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hjj {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Regime { Lemma1General, Lemma3StrongL, Lemma4StrongJump, Theorem1, Theorem2 };

inline std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::Lemma1General: return "lemma1-general";
    case Regime::Lemma3StrongL: return "lemma3-strongL";
    case Regime::Lemma4StrongJump: return "lemma4-strongjump";
    case Regime::Theorem1: return "theorem1";
    case Regime::Theorem2: return "theorem2";
    }
    return "?";
}

inline Regime parse_regime(std::string_view s) {
    for (Regime r : {Regime::Lemma1General, Regime::Lemma3StrongL, Regime::Lemma4StrongJump,
                     Regime::Theorem1, Regime::Theorem2})
        if (to_string(r) == s) return r;
    throw SpecError("unknown regime '" + std::string(s) + "'");
}

/// Strictly increasing jump times t_0 = 0 < t_1 < ... with magnitudes dy_j >= 0 for j >= 1.
class JumpSchedule {
public:
    JumpSchedule() = default;

    /// `magnitudes[j-1]` is dy at times[j]. The last time must reach the horizon.
    static JumpSchedule explicit_times(std::vector<double> times, std::vector<std::vector<double>> magnitudes,
                                       double horizon) {
        JumpSchedule s;
        s.times_ = std::move(times);
        s.magnitudes_ = std::move(magnitudes);
        s.horizon_ = horizon;
        s.check();
        return s;
    }

    /// t_j = j * period up to the first time >= horizon; magnitudes cycle through `pattern`.
    static JumpSchedule periodic(double period, const std::vector<std::vector<double>>& pattern, double horizon) {
        if (!(period > 0.0)) throw SpecError("schedule period must be positive");
        if (pattern.empty()) throw SpecError("periodic schedule needs at least one jump magnitude");
        if (!(horizon > 0.0)) throw SpecError("schedule horizon must be positive");
        JumpSchedule s;
        s.horizon_ = horizon;
        s.times_ = {0.0};
        for (std::size_t j = 1;; ++j) {
            const double t = static_cast<double>(j) * period;
            s.times_.push_back(t);
            s.magnitudes_.push_back(pattern[(j - 1) % pattern.size()]);
            if (t >= horizon) break;
        }
        s.check();
        return s;
    }

    const std::vector<double>& times() const noexcept { return times_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return times_.size(); }
    double time(std::size_t j) const { return times_.at(j); }

    /// dy(t_j), j >= 1.
    const std::vector<double>& magnitude(std::size_t j) const {
        if (j == 0 || j >= times_.size()) throw Error("jump index out of range");
        return magnitudes_[j - 1];
    }

    /// Largest gap between consecutive times.
    double spacing() const {
        double d = 0.0;
        for (std::size_t j = 0; j + 1 < times_.size(); ++j) d = std::max(d, times_[j + 1] - times_[j]);
        return d;
    }

    /// Index j with t_j <= t < t_{j+1}; t at a jump time belongs to the later interval.
    std::size_t interval(double t) const {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        if (it == times_.begin()) return 0;
        return static_cast<std::size_t>(it - times_.begin()) - 1;
    }

    /// Jump indices j >= 1 with t_j <= t.
    std::size_t jumps_up_to(double t) const { return interval(t); }

    /// Same schedule with every magnitude component multiplied by `factor`.
    JumpSchedule scaled(double factor) const {
        JumpSchedule s = *this;
        for (auto& m : s.magnitudes_)
            for (auto& v : m) v *= factor;
        s.check();
        return s;
    }

private:
    void check() const {
        if (times_.empty() || times_.front() != 0.0) throw SpecError("schedule must start at t_0 = 0");
        for (std::size_t j = 0; j + 1 < times_.size(); ++j)
            if (!(times_[j + 1] > times_[j])) throw SpecError("schedule times must be strictly increasing");
        if (times_.size() < 2) throw SpecError("schedule needs at least one jump time");
        if (magnitudes_.size() != times_.size() - 1)
            throw SpecError("schedule needs one magnitude vector per jump time t_j, j >= 1");
        if (!(horizon_ > 0.0)) throw SpecError("schedule horizon must be positive");
        if (times_.back() < horizon_) throw SpecError("schedule times must reach the horizon");
        for (const auto& m : magnitudes_)
            for (double v : m)
                if (!(v >= 0.0) || !std::isfinite(v)) throw SpecError("jump magnitudes must be finite and >= 0");
    }

    std::vector<double> times_{0.0};
    std::vector<std::vector<double>> magnitudes_;
    double horizon_ = 0.0;
};

struct GridConfig {
    std::size_t u_points = 1001;
    std::size_t x_points = 41;          // per axis, n <= 3
    std::size_t lhs_samples = 100000;   // n > 3
    std::uint64_t lhs_seed = 0x5eed1234u;
};

struct Numerics {
    std::optional<double> step;  // default min(1e-3, d/100)
    double tol = 1e-12;
    std::size_t max_iter = 200;
    GridConfig grid;
    double commute_tol = 1e-9;
    double zero_tol = 1e-10;     // slack for vanishing and sign conditions
};

struct ScheduleDefinition {
    enum class Mode { Explicit, Periodic };
    Mode mode = Mode::Periodic;
    std::vector<double> times;                 // explicit
    double period = 0.0;                       // periodic
    std::vector<std::vector<double>> deltas;   // explicit: one per t_j, j >= 1; periodic: cycled
    double horizon = 0.0;
};

/// Textual problem description, as read from a problem file.
struct ProblemDefinition {
    std::string name;
    Regime regime = Regime::Theorem1;
    std::size_t n = 1;
    std::size_t m = 1;
    double u_star = 0.0;
    std::vector<double> x_star;
    double gamma = 1.0;
    std::string L;
    std::vector<std::string> alphas;
    std::vector<std::vector<std::string>> gfields;
    std::vector<std::string> h;
    std::string u0;
    ScheduleDefinition schedule;
    Numerics numerics;
};

inline std::vector<std::string> space_variables(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
    return v;
}

/// Compiled, immutable problem instance.
class ProblemSpec {
public:
    explicit ProblemSpec(ProblemDefinition def) : def_{std::move(def)} { build(); }

    const ProblemDefinition& definition() const noexcept { return def_; }
    const std::string& name() const noexcept { return def_.name; }
    Regime regime() const noexcept { return def_.regime; }
    std::size_t n() const noexcept { return def_.n; }
    std::size_t m() const noexcept { return def_.m; }
    std::size_t fields() const noexcept { return alphas_.size(); }
    double u_star() const noexcept { return def_.u_star; }
    const Point& x_star() const noexcept { return x_star_; }
    double gamma() const noexcept { return def_.gamma; }
    double a() const noexcept { return def_.u_star - 1.0; }
    double b() const noexcept { return def_.u_star + 1.0; }
    const JumpSchedule& schedule() const noexcept { return schedule_; }
    const Numerics& numerics() const noexcept { return def_.numerics; }

    /// L and h depend on x only in the lemma1-general regime.
    bool x_dependent() const noexcept { return def_.regime == Regime::Lemma1General; }

    /// Integration step: explicit numerics.step, else min(1e-3, d/100).
    double step() const {
        if (def_.numerics.step) return *def_.numerics.step;
        return std::min(1e-3, schedule_.spacing() / 100.0);
    }

    const Expr& L() const noexcept { return L_; }
    const Expr& alpha(std::size_t k) const { return alphas_.at(k); }
    const Expr& gfield(std::size_t k, std::size_t i) const { return gfields_.at(k).at(i); }
    const Expr& h(std::size_t i) const { return h_.at(i); }
    const Expr& u0() const noexcept { return u0_; }

    // Bindings for L and h are [u] or [u, x1..xn]; for g_k and u0 they are [x1..xn].

    Dual L_d(double u, std::span<const double> x = {}) const { return eval_ux(L_, u, x); }
    Dual h_d(std::size_t i, double u, std::span<const double> x = {}) const { return eval_ux(h_.at(i), u, x); }
    Dual alpha_d(std::size_t k, double u) const {
        const double v[1] = {u};
        return alphas_.at(k).eval_d(std::span<const double>(v, 1), 0);
    }

    double u0_at(std::span<const double> x) const { return u0_.eval(x); }

    Point u0_gradient(std::span<const double> x) const {
        Point g(static_cast<Eigen::Index>(n()));
        for (std::size_t i = 0; i < n(); ++i) g[static_cast<Eigen::Index>(i)] = u0_.eval_d(x, i).deriv;
        return g;
    }

    /// g_k(x) written into `out` (length n).
    void gfield_at(std::size_t k, std::span<const double> x, std::span<double> out) const {
        const auto& f = gfields_.at(k);
        for (std::size_t i = 0; i < n(); ++i) out[i] = f[i].eval(x);
    }

    Point gfield_at(std::size_t k, const Point& x) const {
        Point out(x.size());
        gfield_at(k, span(x), std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
        return out;
    }

    /// Jacobian D g_k(x), row i = gradient of component i.
    Matrix gfield_jacobian(std::size_t k, const Point& x) const {
        const auto nn = static_cast<Eigen::Index>(n());
        Matrix J(nn, nn);
        gfield_jacobian(k, span(x), J);
        return J;
    }

    void gfield_jacobian(std::size_t k, std::span<const double> x, Matrix& J) const {
        const auto& f = gfields_.at(k);
        for (std::size_t i = 0; i < n(); ++i)
            for (std::size_t c = 0; c < n(); ++c)
                J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = f[i].eval_d(x, c).deriv;
    }

    /// <h(u, x), dy> and its u-derivative.
    Dual jump_d(double u, const std::vector<double>& dy, std::span<const double> x = {}) const {
        Dual s{0.0, 0.0};
        for (std::size_t i = 0; i < m(); ++i) s = s + h_d(i, u, x) * Dual{dy[i], 0.0};
        return s;
    }

    static std::span<const double> span(const Point& p) {
        return {p.data(), static_cast<std::size_t>(p.size())};
    }

private:
    Dual eval_ux(const Expr& e, double u, std::span<const double> x) const {
        if (!x_dependent()) {
            const double v[1] = {u};
            return e.eval_d(std::span<const double>(v, 1), 0);
        }
        if (x.size() != n()) throw Error("x-dependent function evaluated without a position");
        double buf[16];
        std::vector<double> heap;
        double* vals = buf;
        if (n() + 1 > 16) {
            heap.resize(n() + 1);
            vals = heap.data();
        }
        vals[0] = u;
        std::copy(x.begin(), x.end(), vals + 1);
        return e.eval_d(std::span<const double>(vals, n() + 1), 0);
    }

    static Expr parse_field(const std::string& src, const std::vector<std::string>& vars, const std::string& label) {
        try {
            return Expr::parse(src, vars);
        } catch (const ParseError& e) {
            throw e.in(label);
        }
    }

    void build() {
        const auto& d = def_;
        if (d.n == 0) throw SpecError("dims.n must be >= 1");
        if (d.m == 0) throw SpecError("dims.m must be >= 1");
        if (!(d.gamma > 0.0)) throw SpecError("gamma must be > 0");
        if (d.x_star.size() != d.n) throw SpecError("x_star must have n entries");
        if (d.alphas.empty()) throw SpecError("at least one alpha/g pair is required");
        if (d.alphas.size() != d.gfields.size()) throw SpecError("alphas and gfields must have equal length");
        if (d.h.size() != d.m) throw SpecError("h must have m entries");
        if (d.regime == Regime::Theorem1 && d.alphas.size() != 1)
            throw SpecError("regime theorem1 requires exactly one (alpha, g) pair");
        if (d.regime == Regime::Theorem2 && d.alphas.size() != 2)
            throw SpecError("regime theorem2 requires exactly two (alpha, g) pairs");

        x_star_ = Point(static_cast<Eigen::Index>(d.n));
        for (std::size_t i = 0; i < d.n; ++i) x_star_[static_cast<Eigen::Index>(i)] = d.x_star[i];

        const auto xs = space_variables(d.n);
        std::vector<std::string> us{"u"};
        if (x_dependent()) us.insert(us.end(), xs.begin(), xs.end());

        L_ = parse_field(d.L, us, "L");
        for (std::size_t k = 0; k < d.alphas.size(); ++k)
            alphas_.push_back(parse_field(d.alphas[k], {"u"}, "alphas[" + std::to_string(k) + "]"));
        for (std::size_t k = 0; k < d.gfields.size(); ++k) {
            const auto& field = d.gfields[k];
            if (field.size() != d.n) throw SpecError("every g field needs n components");
            std::vector<Expr> comps;
            for (std::size_t i = 0; i < field.size(); ++i)
                comps.push_back(parse_field(field[i], xs, "gfields[" + std::to_string(k) + "][" + std::to_string(i) + "]"));
            gfields_.push_back(std::move(comps));
        }
        for (std::size_t i = 0; i < d.h.size(); ++i)
            h_.push_back(parse_field(d.h[i], us, "h[" + std::to_string(i) + "]"));
        u0_ = parse_field(d.u0, xs, "u0");

        const auto& sd = d.schedule;
        for (const auto& dy : sd.deltas)
            if (dy.size() != d.m) throw SpecError("every jump magnitude needs m entries");
        if (sd.mode == ScheduleDefinition::Mode::Periodic) {
            schedule_ = JumpSchedule::periodic(sd.period, sd.deltas, sd.horizon);
        } else {
            schedule_ = JumpSchedule::explicit_times(sd.times, sd.deltas, sd.horizon);
        }
        if (d.numerics.step && !(*d.numerics.step > 0.0)) throw SpecError("numerics.step must be > 0");
        if (d.numerics.grid.u_points < 2 || d.numerics.grid.x_points < 2)
            throw SpecError("grid resolutions must be >= 2");
    }

    ProblemDefinition def_;
    Point x_star_;
    JumpSchedule schedule_;
    Expr L_;
    std::vector<Expr> alphas_;
    std::vector<std::vector<Expr>> gfields_;
    std::vector<Expr> h_;
    Expr u0_;
};

}  // namespace hjj
