// SPDX-License-Identifier: MIT
/**
    \file
    \brief first-order forward-mode dual numbers
*/

#pragma once

#include <cmath>

namespace hjj {

/// Value plus derivative with respect to one seeded variable.
struct Dual {
    double value = 0.0;
    double deriv = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double v) : value{v} {}  // NOLINT: constants promote implicitly
    constexpr Dual(double v, double d) : value{v}, deriv{d} {}

    static constexpr Dual variable(double v) { return {v, 1.0}; }

    friend constexpr bool operator==(const Dual&, const Dual&) = default;
};

constexpr Dual operator+(Dual a, Dual b) { return {a.value + b.value, a.deriv + b.deriv}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.value - b.value, a.deriv - b.deriv}; }
constexpr Dual operator-(Dual a) { return {-a.value, -a.deriv}; }
constexpr Dual operator*(Dual a, Dual b) {
    return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
}
constexpr Dual operator/(Dual a, Dual b) {
    return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
}

inline Dual sin(Dual a) { return {std::sin(a.value), std::cos(a.value) * a.deriv}; }
inline Dual cos(Dual a) { return {std::cos(a.value), -std::sin(a.value) * a.deriv}; }
inline Dual exp(Dual a) {
    const double e = std::exp(a.value);
    return {e, e * a.deriv};
}
inline Dual log(Dual a) { return {std::log(a.value), a.deriv / a.value}; }
inline Dual tanh(Dual a) {
    const double t = std::tanh(a.value);
    return {t, (1.0 - t * t) * a.deriv};
}
// d|x| at 0 is taken as 0
inline Dual abs(Dual a) {
    const double sign = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
    return {std::abs(a.value), sign * a.deriv};
}
inline Dual sqrt(Dual a) {
    const double r = std::sqrt(a.value);
    return {r, a.deriv == 0.0 ? 0.0 : a.deriv / (2.0 * r)};
}
inline Dual pow(Dual a, int n) {
    if (n == 0) return {1.0, 0.0};
    return {std::pow(a.value, n), n * std::pow(a.value, n - 1) * a.deriv};
}

}  // namespace hjj
