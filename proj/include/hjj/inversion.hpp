// SPDX-License-Identifier: MIT
/**
    \file
    \brief inverting x = x_hat(t; lambda) for lambda by Picard iteration

    V(t,x;lambda) = G_l(-tau_l) o ... o G_1(-tau_1)[x] with tau_k = tau_k(t;lambda).
    psi(t,x) is the fixed point lambda = V(t,x;lambda), iterated from lambda_0 = x*.
    With M = d_lambda V = -sum_k g_k(V) (d_lambda tau_k)^T,

        d_t psi = (I - M)^{-1} d_t V,   d_i psi = (I - M)^{-1} d_i V.
*/

#pragma once

#include <hjj/characteristics.hpp>
#include <hjj/flow.hpp>

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <vector>

namespace hjj {

struct TauValues {
    std::vector<double> tau;
    Matrix gradient;  // n x l, column k = d_lambda tau_k
};

inline TauValues tau_from_state(const CharState& c, const Point& grad_u0) {
    TauValues out;
    out.tau = c.tau;
    out.gradient = Matrix(grad_u0.size(), static_cast<Eigen::Index>(c.tau.size()));
    for (std::size_t k = 0; k < c.tau.size(); ++k) out.gradient.col(static_cast<Eigen::Index>(k)) = c.dtau[k] * grad_u0;
    return out;
}

inline TauValues tau(const CharacteristicPath& path, double t) {
    if (!path.sensitivity_available()) throw Error("d_lambda tau is unavailable for x-dependent L or h");
    return tau_from_state(path.at(t), path.u0_gradient());
}

inline TauValues tau(const ProblemSpec& spec, const Point& lambda, double t) {
    if (spec.x_dependent()) throw Error("d_lambda tau is unavailable for x-dependent L or h");
    return tau_from_state(characteristic_state(spec, lambda, t), spec.u0_gradient(ProblemSpec::span(lambda)));
}

/// G_l(-tau_l) o ... o G_1(-tau_1)[x].
inline Point v_map(const ProblemSpec& spec, const Point& x, const std::vector<double>& tau) {
    Point y = x;
    for (std::size_t k = 0; k < tau.size(); ++k) y = flow_map(spec, k, -tau[k], y);
    return y;
}

/// V(t, x; lambda).
inline Point v_map(const ProblemSpec& spec, double t, const Point& x, const Point& lambda) {
    return v_map(spec, x, characteristic_state(spec, lambda, t).tau);
}

/// d_lambda V = -sum_k g_k(V) (d_lambda tau_k)^T.
inline Matrix v_lambda_jacobian(const ProblemSpec& spec, const Point& v, const TauValues& tv) {
    const auto n = v.size();
    Matrix M = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < tv.tau.size(); ++k)
        M.noalias() -= spec.gfield_at(k, v) * tv.gradient.col(static_cast<Eigen::Index>(k)).transpose();
    return M;
}

inline double operator_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    if (M.rows() == 1 || M.cols() == 1) return M.norm();
    return Eigen::JacobiSVD<Matrix>(M).singularValues()(0);
}

struct InversionResult {
    Point psi;
    std::size_t iterations = 0;
    double residual = 0.0;            // |psi - V(t,x;psi)|
    double modulus = 0.0;             // max |M| over the iterates
    std::vector<double> steps;        // |lambda_{k+1} - lambda_k|
    double max_step_ratio = 0.0;      // max steps[k] / steps[k-1]
    Point dpsi_dt;
    Matrix dpsi_dx;
    CharState state;                  // characteristic of psi at t
    std::vector<std::string> warnings;
};

/// Steps whose predecessor is below this are round-off and are not used for ratios.
inline constexpr double step_ratio_floor = 1e-13;

inline InversionResult solve_psi(const ProblemSpec& spec, double t, const Point& x, double tol, std::size_t max_iter) {
    if (spec.x_dependent()) throw Error("inversion is unavailable for x-dependent L or h");
    if (spec.fields() > 2) throw Error("inversion supports one or two fields");
    if (static_cast<std::size_t>(x.size()) != spec.n()) throw Error("x has wrong dimension");
    const double contain = 2.0 * spec.gamma() * (1.0 + 1e-12);

    InversionResult r;
    Point lambda = spec.x_star();
    double last = -1.0;
    bool converged = false;
    for (std::size_t it = 0; it <= max_iter; ++it) {
        const CharState c = characteristic_state(spec, lambda, t);
        const TauValues tv = tau_from_state(c, spec.u0_gradient(ProblemSpec::span(lambda)));
        const Point v = v_map(spec, x, tv.tau);
        r.modulus = std::max(r.modulus, operator_norm(v_lambda_jacobian(spec, v, tv)));
        if (r.modulus >= 1.0)
            throw InversionError(InversionError::Kind::NonContraction,
                                 "contraction modulus " + std::to_string(r.modulus) + " >= 1", (v - lambda).norm());
        if ((v - spec.x_star()).norm() > contain && r.warnings.empty())
            r.warnings.push_back("iterate left B(x*, 2 gamma)");
        const double step = (v - lambda).norm();
        r.steps.push_back(step);
        if (last >= step_ratio_floor) r.max_step_ratio = std::max(r.max_step_ratio, step / last);
        last = step;
        lambda = v;
        if (step <= tol) {
            converged = true;
            break;
        }
        if (it == max_iter) break;
        r.iterations = it + 1;
    }
    if (!converged)
        throw InversionError(InversionError::Kind::MaxIterations,
                             "no convergence after " + std::to_string(max_iter) + " iterations", last);

    // Final evaluation at psi.
    r.psi = lambda;
    r.state = characteristic_state(spec, r.psi, t);
    const Point grad = spec.u0_gradient(ProblemSpec::span(r.psi));
    const TauValues tv = tau_from_state(r.state, grad);

    const auto n = x.size();
    Point v = x;
    Matrix dv_dx = Matrix::Identity(n, n);
    for (std::size_t k = 0; k < tv.tau.size(); ++k) {
        const auto f = flow_with_jacobian(spec, k, -tv.tau[k], v);
        v = f.point;
        dv_dx = f.jacobian * dv_dx;
    }
    r.residual = (r.psi - v).norm();
    const Matrix M = v_lambda_jacobian(spec, v, tv);
    r.modulus = std::max(r.modulus, operator_norm(M));

    Point dv_dt = Point::Zero(n);
    for (std::size_t k = 0; k < tv.tau.size(); ++k)
        dv_dt -= spec.gfield_at(k, v) * spec.alpha_d(k, r.state.u).value;

    const Matrix A = Matrix::Identity(n, n) - M;
    Eigen::FullPivLU<Matrix> lu(A);
    if (lu.rank() < n || std::abs(lu.determinant()) < 1e-12)
        throw InversionError(InversionError::Kind::Singular, "I - M is numerically singular", r.residual);
    r.dpsi_dt = lu.solve(dv_dt);
    r.dpsi_dx = lu.solve(dv_dx);
    if ((r.psi - spec.x_star()).norm() > contain) r.warnings.push_back("psi outside B(x*, 2 gamma)");
    return r;
}

inline InversionResult solve_psi(const ProblemSpec& spec, double t, const Point& x) {
    return solve_psi(spec, t, x, spec.numerics().tol, spec.numerics().max_iter);
}

}  // namespace hjj
