#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "proxipair/body.hpp"
#include "proxipair/instance.hpp"

namespace proxipair {

using Rng = std::mt19937_64;

struct SamplingOptions {
    /// Half-width of the window used for unbounded bodies, centred on the
    /// body's witness point.
    double window = 10.0;
    /// Alternating-projection budget when pulling a sample onto A0 or B0.
    std::size_t proximal_iter = 1000;
    double proximal_tol = 1e-14;
};

namespace detail {

inline Point uniform_in_box(Rng& rng, const Point& lo, const Point& hi) {
    Point x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        x[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    return x;
}

inline Point gaussian(Rng& rng, Eigen::Index n) {
    std::normal_distribution<double> g;
    Point x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = g(rng);
    return x;
}

}  // namespace detail

/// Random point of `body`.
///
/// Balls: random direction scaled by a uniform radius fraction. Boxes:
/// uniform. Polytopes: convex combination of vertices with exponential
/// weights. Half-spaces and hyperplanes: uniform in a window around the
/// witness, then projected. Intersections: a sample of the first member
/// projected onto the intersection.
inline Point sample_in(const ConvexBody& body, Rng& rng, const SamplingOptions& opts = {}) {
    const LpSpace& space = body.space();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (const auto* b = body.as<Ball>()) {
        Point dir = detail::gaussian(rng, b->center.size());
        const double len = detail::lp_norm(dir, space.p());
        if (len == 0.0) return b->center;
        return b->center + (b->radius * unit(rng) / len) * dir;
    }
    if (const auto* b = body.as<Box>()) return detail::uniform_in_box(rng, b->lo, b->hi);
    if (const auto* poly = body.as<Polytope>()) {
        if (poly->segment) {
            const double t = unit(rng);
            return (1.0 - t) * poly->segment->first + t * poly->segment->second;
        }
        std::exponential_distribution<double> e(1.0);
        Point x = Point::Zero(static_cast<Eigen::Index>(space.dim()));
        double total = 0.0;
        for (const auto& v : poly->vertices) {
            const double w = e(rng);
            x += w * v;
            total += w;
        }
        return x / total;
    }
    if (const auto* in = body.as<Intersection>())
        return project(body, sample_in(in->parts.front(), rng, opts));
    const Point c = body.witness();
    const Point half = Point::Constant(c.size(), opts.window);
    return project(body, detail::uniform_in_box(rng, c - half, c + half));
}

/// Deterministic boundary points used to seed certification: ball poles
/// c +- r e_i, polytope and box vertices (capped at `cap` points).
inline std::vector<Point> extreme_points(const ConvexBody& body, std::size_t cap = 256) {
    std::vector<Point> out;
    if (const auto* b = body.as<Ball>()) {
        for (Eigen::Index i = 0; i < b->center.size() && out.size() + 2 <= cap; ++i) {
            Point e = Point::Zero(b->center.size());
            e[i] = b->radius;
            out.push_back(b->center + e);
            out.push_back(b->center - e);
        }
        return out;
    }
    out = vertices(body);
    if (out.size() > cap) out.resize(cap);
    return out;
}

/// A point of the proximal set on `side`, obtained by alternating projections
/// from a random point of that side. The result is checked against
/// dist(A, B); returns nullopt if the pull did not land inside the proximal
/// set (which can only happen for non-attained distances).
inline std::optional<Point> sample_proximal(const ProximityInstance& inst, Side side, Rng& rng,
                                            const SamplingOptions& opts = {}) {
    const ConvexBody& own = inst.body(side);
    const ConvexBody& other = inst.body(opposite(side));
    Point x = sample_in(own, rng, opts);
    double last = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < opts.proximal_iter; ++it) {
        Point next = project(own, project(other, x));
        const double step = inst.norm_dist(x, next);
        x = std::move(next);
        if (step <= opts.proximal_tol * (1.0 + x.cwiseAbs().maxCoeff())) break;
        // Stalled at rounding level of an iterative projection.
        if (step >= last && step <= 1e-3 * inst.tol()) break;
        last = step;
    }
    if (proximal_excess(inst, x, side) > inst.tol()) return std::nullopt;
    return x;
}

}  // namespace proxipair
