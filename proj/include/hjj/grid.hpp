// SPDX-License-Identifier: MIT
/**
    \file
    \brief deterministic sample sets on intervals and closed balls
*/

#pragma once

#include <hjj/problem.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace hjj {

/// `count` equispaced points on [lo, hi], both ends included.
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    v.back() = hi;
    return v;
}

namespace detail {

inline bool in_ball(const Point& x, const Point& center, double radius) {
    return (x - center).norm() <= radius * (1.0 + 1e-12);
}

// Latin hypercube on [-1,1]^n, squeezed radially onto the unit ball.
inline std::vector<Point> lhs_ball(std::size_t n, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    std::vector<std::vector<std::size_t>> perms(n, std::vector<std::size_t>(samples));
    for (auto& p : perms) {
        std::iota(p.begin(), p.end(), std::size_t{0});
        std::shuffle(p.begin(), p.end(), rng);
    }
    std::vector<Point> out;
    out.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        Point x(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const double cell = (static_cast<double>(perms[i][s]) + jitter(rng)) / static_cast<double>(samples);
            x[static_cast<Eigen::Index>(i)] = 2.0 * cell - 1.0;
        }
        const double two = x.norm();
        if (two > 0.0) x *= x.lpNorm<Eigen::Infinity>() / two;
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace detail

/// Sample points of the closed ball B(center, radius): a tensor grid with
/// `per_axis` points per axis clipped to the ball when n <= 3, otherwise the
/// center plus `lhs_samples` Latin-hypercube points.
inline std::vector<Point> ball_grid(const Point& center, double radius, std::size_t per_axis,
                                    std::size_t lhs_samples = 100000, std::uint64_t seed = 0x5eed1234u) {
    const auto n = static_cast<std::size_t>(center.size());
    std::vector<Point> out;
    if (n <= 3) {
        std::vector<std::vector<double>> axes;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = center[static_cast<Eigen::Index>(i)];
            axes.push_back(linspace(c - radius, c + radius, per_axis));
        }
        std::vector<std::size_t> idx(n, 0);
        for (;;) {
            Point x(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = axes[i][idx[i]];
            if (detail::in_ball(x, center, radius)) out.push_back(std::move(x));
            std::size_t i = n;
            while (i > 0) {
                --i;
                if (++idx[i] < per_axis) break;
                idx[i] = 0;
                if (i == 0) return out;
            }
            if (n == 0) return out;
        }
    }
    out.push_back(center);
    for (auto& p : detail::lhs_ball(n, lhs_samples, seed)) out.push_back(center + radius * p);
    return out;
}

inline std::vector<Point> ball_grid(const Point& center, double radius, const GridConfig& cfg) {
    return ball_grid(center, radius, cfg.x_points, cfg.lhs_samples, cfg.lhs_seed);
}

/// Directions on the unit sphere used for far-field probing.
inline std::vector<Point> sphere_directions(std::size_t n) {
    std::vector<Point> dirs;
    if (n == 1) {
        dirs.push_back(Point::Constant(1, 1.0));
        dirs.push_back(Point::Constant(1, -1.0));
        return dirs;
    }
    if (n == 2) {
        constexpr std::size_t count = 64;
        for (std::size_t k = 0; k < count; ++k) {
            const double a = 2.0 * M_PI * static_cast<double>(k) / count;
            Point d(2);
            d << std::cos(a), std::sin(a);
            dirs.push_back(d);
        }
        return dirs;
    }
    if (n == 3) {
        constexpr std::size_t count = 256;
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (std::size_t k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / count;
            const double r = std::sqrt(1.0 - z * z);
            const double a = golden * static_cast<double>(k);
            Point d(3);
            d << r * std::cos(a), r * std::sin(a), z;
            dirs.push_back(d);
        }
        return dirs;
    }
    std::mt19937_64 rng(0xd1eec7u);
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < 1000; ++k) {
        Point d(static_cast<Eigen::Index>(n));
        for (auto& v : d) v = normal(rng);
        dirs.push_back(d / d.norm());
    }
    return dirs;
}

/// Shells at radii radius*2^k, k = 1..12, around center.
inline std::vector<Point> far_field_points(const Point& center, double radius) {
    std::vector<Point> out;
    const auto dirs = sphere_directions(static_cast<std::size_t>(center.size()));
    for (int k = 1; k <= 12; ++k) {
        const double r = radius * std::ldexp(1.0, k);
        for (const auto& d : dirs) out.push_back(center + r * d);
    }
    return out;
}

}  // namespace hjj
