#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "proxipair/error.hpp"
#include "proxipair/space.hpp"

namespace proxipair {

class ConvexBody;

struct Ball {
    Point center;
    double radius;
};

/// Axis-aligned box lo <= x <= hi. Degenerate sides (lo_i == hi_i) are allowed.
struct Box {
    Point lo;
    Point hi;
};

/// { x : <normal, x> <= offset }
struct Halfspace {
    Point normal;
    double offset;
};

/// { x : <normal, x> == offset }
struct Hyperplane {
    Point normal;
    double offset;
};

/// Convex hull of a vertex list.
///
/// Collinear vertex sets (including a single vertex) are kept as a segment
/// between the two extreme vertices. In the plane the hull edges are turned
/// into facets automatically; in higher dimension facets must be supplied.
struct Polytope {
    std::vector<Point> vertices;
    std::vector<Halfspace> facets;
    std::optional<std::pair<Point, Point>> segment;
};

struct Intersection {
    std::vector<ConvexBody> parts;
    Point witness;
};

struct ProjectionOptions {
    double tol = 1e-9;
    std::size_t max_iter = 100000;
};

/// A nonempty closed convex subset of an LpSpace. Immutable once built; use
/// the named constructors, which validate their arguments.
class ConvexBody {
public:
    using Shape = std::variant<Ball, Box, Halfspace, Hyperplane, Polytope, Intersection>;

    static ConvexBody ball(const LpSpace& space, Point center, double radius);
    static ConvexBody box(const LpSpace& space, Point lo, Point hi);
    static ConvexBody halfspace(const LpSpace& space, Point normal, double offset);
    static ConvexBody hyperplane(const LpSpace& space, Point normal, double offset);
    static ConvexBody polytope(const LpSpace& space, std::vector<Point> vertices,
                               std::vector<Halfspace> facets = {});
    static ConvexBody segment(const LpSpace& space, Point from, Point to) {
        return polytope(space, {std::move(from), std::move(to)});
    }
    static ConvexBody intersection(const LpSpace& space, std::vector<ConvexBody> parts,
                                   Point witness);

    const LpSpace& space() const noexcept { return space_; }
    const Shape& shape() const noexcept { return shape_; }

    template <class S>
    const S* as() const noexcept {
        return std::get_if<S>(&shape_);
    }

    const char* kind() const noexcept;
    bool bounded() const noexcept;
    /// A point known to lie in the body.
    Point witness() const;

private:
    ConvexBody(LpSpace space, Shape shape) : space_(space), shape_(std::move(shape)) {}

    LpSpace space_;
    Shape shape_;
};

inline Point project(const ConvexBody& body, const Point& x, const ProjectionOptions& opts = {});

inline bool contains(const ConvexBody& body, const Point& x, double tol = 1e-9,
                     const ProjectionOptions& opts = {});

// ---------------------------------------------------------------------------

namespace detail {

inline void require_finite(const Point& x, const std::string& field) {
    if (!x.allFinite()) throw InvalidArgument(field + ": coordinates must be finite");
}

inline void require_dim(const LpSpace& space, const Point& x, const std::string& field) {
    if (static_cast<std::size_t>(x.size()) != space.dim())
        throw InvalidArgument(field + ": expected " + std::to_string(space.dim()) +
                              " coordinates, got " + std::to_string(x.size()));
    require_finite(x, field);
}

inline double cross2(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain; returns the hull counterclockwise without
// repeating the first vertex.
inline std::vector<Point> convex_hull_2d(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) { return a == b; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        const auto& p = pts[i - 1];
        while (k >= t && cross2(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

// Extreme points of a collinear vertex set, or nullopt when the set spans
// more than a line.
inline std::optional<std::pair<Point, Point>> collinear_extent(const std::vector<Point>& vs) {
    const Point& base = vs.front();
    Point dir = Point::Zero(base.size());
    double best = 0.0;
    for (const auto& v : vs) {
        const double len = (v - base).norm();
        if (len > best) {
            best = len;
            dir = v - base;
        }
    }
    if (best == 0.0) return std::make_pair(base, base);
    dir /= best;
    double scale = best;
    for (const auto& v : vs) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    double tmin = 0.0, tmax = 0.0;
    Point lo = base, hi = base;
    for (const auto& v : vs) {
        const Point r = v - base;
        const double t = r.dot(dir);
        if ((r - t * dir).norm() > 1e-12 * scale) return std::nullopt;
        if (t < tmin) tmin = t, lo = v;
        if (t > tmax) tmax = t, hi = v;
    }
    return std::make_pair(lo, hi);
}

}  // namespace detail

inline ConvexBody ConvexBody::ball(const LpSpace& space, Point center, double radius) {
    detail::require_dim(space, center, "center");
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw InvalidArgument("radius: must be positive and finite, got " + std::to_string(radius));
    return ConvexBody(space, Ball{std::move(center), radius});
}

inline ConvexBody ConvexBody::box(const LpSpace& space, Point lo, Point hi) {
    detail::require_dim(space, lo, "lo");
    detail::require_dim(space, hi, "hi");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i])
            throw InvalidArgument("lo: must not exceed hi (coordinate " + std::to_string(i) + ")");
    return ConvexBody(space, Box{std::move(lo), std::move(hi)});
}

inline ConvexBody ConvexBody::halfspace(const LpSpace& space, Point normal, double offset) {
    detail::require_dim(space, normal, "normal");
    if (normal.isZero(0.0)) throw InvalidArgument("normal: must be nonzero");
    if (!std::isfinite(offset)) throw InvalidArgument("offset: must be finite");
    return ConvexBody(space, Halfspace{std::move(normal), offset});
}

inline ConvexBody ConvexBody::hyperplane(const LpSpace& space, Point normal, double offset) {
    detail::require_dim(space, normal, "normal");
    if (normal.isZero(0.0)) throw InvalidArgument("normal: must be nonzero");
    if (!std::isfinite(offset)) throw InvalidArgument("offset: must be finite");
    return ConvexBody(space, Hyperplane{std::move(normal), offset});
}

inline ConvexBody ConvexBody::polytope(const LpSpace& space, std::vector<Point> vertices,
                                       std::vector<Halfspace> facets) {
    if (vertices.empty()) throw InvalidArgument("vertices: need at least one vertex");
    for (std::size_t i = 0; i < vertices.size(); ++i)
        detail::require_dim(space, vertices[i], "vertices[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < facets.size(); ++i) {
        const std::string field = "facets[" + std::to_string(i) + "]";
        detail::require_dim(space, facets[i].normal, field + ".normal");
        if (facets[i].normal.isZero(0.0)) throw InvalidArgument(field + ".normal: must be nonzero");
    }

    Polytope poly;
    poly.segment = detail::collinear_extent(vertices);
    if (!poly.segment) {
        if (space.dim() == 2 && facets.empty()) {
            vertices = detail::convex_hull_2d(std::move(vertices));
            for (std::size_t i = 0; i < vertices.size(); ++i) {
                const Point& a = vertices[i];
                const Point& b = vertices[(i + 1) % vertices.size()];
                Point n(2);
                n << b[1] - a[1], a[0] - b[0];
                n /= n.norm();
                facets.push_back(Halfspace{n, n.dot(a)});
            }
        } else if (facets.empty()) {
            throw InvalidArgument(
                "facets: required for a full-dimensional polytope in dimension > 2");
        }
        for (std::size_t i = 0; i < vertices.size(); ++i)
            for (const auto& f : facets)
                if (f.normal.dot(vertices[i]) > f.offset + 1e-9 * (1.0 + std::abs(f.offset)))
                    throw InvalidArgument("vertices[" + std::to_string(i) +
                                          "]: violates a supplied facet");
    }
    poly.vertices = std::move(vertices);
    poly.facets = std::move(facets);
    return ConvexBody(space, std::move(poly));
}

inline ConvexBody ConvexBody::intersection(const LpSpace& space, std::vector<ConvexBody> parts,
                                           Point witness) {
    if (parts.empty()) throw InvalidArgument("parts: need at least one body");
    detail::require_dim(space, witness, "witness");
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!(parts[i].space() == space))
            throw InvalidArgument("parts[" + std::to_string(i) + "]: lives in a different space");
        if (!contains(parts[i], witness))
            throw InvalidArgument("witness: not contained in parts[" + std::to_string(i) + "]");
    }
    return ConvexBody(space, Intersection{std::move(parts), std::move(witness)});
}

inline const char* ConvexBody::kind() const noexcept {
    struct Name {
        const char* operator()(const Ball&) const { return "ball"; }
        const char* operator()(const Box&) const { return "box"; }
        const char* operator()(const Halfspace&) const { return "halfspace"; }
        const char* operator()(const Hyperplane&) const { return "hyperplane"; }
        const char* operator()(const Polytope&) const { return "polytope"; }
        const char* operator()(const Intersection&) const { return "intersection"; }
    };
    return std::visit(Name{}, shape_);
}

inline bool ConvexBody::bounded() const noexcept {
    if (std::holds_alternative<Halfspace>(shape_) || std::holds_alternative<Hyperplane>(shape_))
        return false;
    if (const auto* in = std::get_if<Intersection>(&shape_))
        return std::any_of(in->parts.begin(), in->parts.end(),
                           [](const ConvexBody& b) { return b.bounded(); });
    return true;
}

inline Point ConvexBody::witness() const {
    struct Pick {
        const ConvexBody& self;
        Point operator()(const Ball& b) const { return b.center; }
        Point operator()(const Box& b) const { return 0.5 * (b.lo + b.hi); }
        Point operator()(const Halfspace&) const { return project(self, self.space().zero()); }
        Point operator()(const Hyperplane&) const { return project(self, self.space().zero()); }
        Point operator()(const Polytope& p) const { return p.vertices.front(); }
        Point operator()(const Intersection& in) const { return in.witness; }
    };
    return std::visit(Pick{*this}, shape_);
}

// ---------------------------------------------------------------------------
// Projections

namespace detail {

inline Point project_ball(const LpSpace& space, const Ball& b, const Point& x) {
    const Point r = x - b.center;
    const double len = lp_norm(r, space.p());
    if (len <= b.radius) return x;
    return b.center + (b.radius / len) * r;
}

// Unit vector (in the p-norm) on which the functional a attains its dual
// norm: <a, z> = ||a||_q, ||z||_p = 1.
inline Point dual_direction(const LpSpace& space, const Point& a) {
    if (space.euclidean()) return a / a.norm();
    const double q = space.conjugate();
    const double aq = lp_norm(a, q);
    Point z(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double s = a[i] / aq;
        z[i] = std::copysign(std::pow(std::abs(s), q - 1.0), s);
    }
    return z;
}

inline Point shift_to_level(const LpSpace& space, const Point& normal, double excess,
                            const Point& x) {
    if (space.euclidean()) return x - (excess / normal.squaredNorm()) * normal;
    return x - (excess / lp_norm(normal, space.conjugate())) * dual_direction(space, normal);
}

inline Point project_halfspace(const LpSpace& space, const Halfspace& h, const Point& x) {
    const double excess = h.normal.dot(x) - h.offset;
    if (excess <= 0.0) return x;
    return shift_to_level(space, h.normal, excess, x);
}

inline Point project_hyperplane(const LpSpace& space, const Hyperplane& h, const Point& x) {
    const double excess = h.normal.dot(x) - h.offset;
    if (excess == 0.0) return x;
    return shift_to_level(space, h.normal, excess, x);
}

// Minimizes t -> ||x - (from + t (to - from))||_p over [0, 1]. The objective
// ||.||_p^p is strictly convex along the segment, so its derivative is
// monotone; Newton steps are kept inside a shrinking bracket and fall back
// to bisection when they leave it.
inline Point project_segment(const LpSpace& space, const Point& from, const Point& to,
                             const Point& x) {
    const Point d = to - from;
    if (d.isZero(0.0)) return from;
    const Point r0 = x - from;
    if (space.euclidean()) {
        const double t = std::clamp(r0.dot(d) / d.squaredNorm(), 0.0, 1.0);
        return from + t * d;
    }
    const double p = space.p();
    auto slope = [&](double t, double* curv) {
        double g = 0.0, h = 0.0;
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            const double r = r0[i] - t * d[i];
            const double a = std::abs(r);
            if (a == 0.0) continue;
            const double pw = std::pow(a, p - 2.0);
            g -= d[i] * r * pw;
            h += d[i] * d[i] * pw;
        }
        if (curv) *curv = (p - 1.0) * h;
        return g;
    };
    if (slope(0.0, nullptr) >= 0.0) return from;
    if (slope(1.0, nullptr) <= 0.0) return to;
    // Each step tries plain Newton and Newton on |slope|^(1/(p-1)); the latter
    // is exact when several residual components vanish together at the
    // minimizer, where plain Newton degrades to linear convergence. Both
    // candidates tighten the bracket; bisection takes over when it stalls.
    const double scale = std::max(1.0, p - 1.0);
    double lo = 0.0, hi = 1.0;
    struct Probe {
        double t, g, h;
    };
    auto eval = [&](double t) {
        Probe e{t, 0.0, 0.0};
        e.g = slope(t, &e.h);
        (e.g < 0.0 ? lo : hi) = t;
        return e;
    };
    // Estimated distance to the root.
    auto reach = [&](const Probe& e) {
        if (e.g == 0.0) return 0.0;
        return e.h > 0.0 ? scale * std::abs(e.g) / e.h : std::numeric_limits<double>::infinity();
    };
    Probe cur = eval(0.5);
    for (int it = 0; it < 200 && reach(cur) > 1e-15 && hi - lo > 1e-15; ++it) {
        const double w = hi - lo;
        std::optional<Probe> best;
        if (cur.h > 0.0) {
            for (double f : {1.0, p - 1.0}) {
                const double c = cur.t - f * cur.g / cur.h;
                if (!(c > lo && c < hi)) continue;
                const Probe e = eval(c);
                if (!best || reach(e) < reach(*best)) best = e;
            }
        }
        if (!best || hi - lo > 0.5 * w) {
            const Probe e = eval(0.5 * (lo + hi));
            if (!best || reach(e) < reach(*best)) best = e;
        }
        cur = *best;
    }
    const double t = cur.t;
    return from + t * d;
}

/// Dykstra's alternating scheme for the Euclidean projection onto an
/// intersection, given a projector for each member set.
template <class ProjectK>
Point dykstra(const Point& x, std::size_t count, ProjectK&& project_k,
              const ProjectionOptions& opts) {
    std::vector<Point> increments(count, Point::Zero(x.size()));
    Point cur = x;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        double change = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const Point shifted = cur + increments[k];
            Point next = project_k(k, shifted);
            Point inc = shifted - next;
            change += (inc - increments[k]).squaredNorm();
            increments[k] = std::move(inc);
            cur = std::move(next);
        }
        if (change < opts.tol * opts.tol) {
            double worst = 0.0;
            for (std::size_t k = 0; k < count; ++k)
                worst = std::max(worst, (project_k(k, cur) - cur).norm());
            if (worst <= opts.tol) return cur;
        }
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < count; ++k)
        worst = std::max(worst, (project_k(k, cur) - cur).norm());
    throw NotConverged("Dykstra projection hit the iteration cap", worst);
}

}  // namespace detail

/// Nearest point of `body` to `x` in the space's p-norm.
///
/// Ball, Box, Halfspace, Hyperplane and segment-like polytopes are exact for
/// every p. Full-dimensional polytopes and intersections go through Dykstra
/// and are Euclidean only; other exponents throw Unsupported.
inline Point project(const ConvexBody& body, const Point& x, const ProjectionOptions& opts) {
    const LpSpace& space = body.space();
    space.check(x);
    struct Visitor {
        const LpSpace& space;
        const Point& x;
        const ProjectionOptions& opts;

        Point operator()(const Ball& b) const { return detail::project_ball(space, b, x); }
        Point operator()(const Box& b) const { return x.cwiseMax(b.lo).cwiseMin(b.hi); }
        Point operator()(const Halfspace& h) const {
            return detail::project_halfspace(space, h, x);
        }
        Point operator()(const Hyperplane& h) const {
            return detail::project_hyperplane(space, h, x);
        }
        Point operator()(const Polytope& poly) const {
            if (poly.segment)
                return detail::project_segment(space, poly.segment->first, poly.segment->second,
                                               x);
            if (!space.euclidean())
                throw Unsupported("polytope projection requires p = 2 (got p = " +
                                  std::to_string(space.p()) + ")");
            return detail::dykstra(
                x, poly.facets.size(),
                [&](std::size_t k, const Point& y) {
                    return detail::project_halfspace(space, poly.facets[k], y);
                },
                opts);
        }
        Point operator()(const Intersection& in) const {
            if (in.parts.size() == 1) return project(in.parts.front(), x, opts);
            if (!space.euclidean())
                throw Unsupported("intersection projection requires p = 2 (got p = " +
                                  std::to_string(space.p()) + ")");
            return detail::dykstra(
                x, in.parts.size(),
                [&](std::size_t k, const Point& y) { return project(in.parts[k], y, opts); },
                opts);
        }
    };
    return std::visit(Visitor{space, x, opts}, body.shape());
}

inline double distance_to(const ConvexBody& body, const Point& x,
                          const ProjectionOptions& opts = {}) {
    return distance(body.space(), x, project(body, x, opts));
}

inline bool contains(const ConvexBody& body, const Point& x, double tol,
                     const ProjectionOptions& opts) {
    if (const auto* in = body.as<Intersection>()) {
        // Cheap rejection: the distance to a member bounds the distance to the
        // intersection from below.
        for (const auto& part : in->parts)
            if (!contains(part, x, tol, opts)) return false;
    }
    return distance_to(body, x, opts) <= tol;
}

/// Vertices of a polytopal body (Box or Polytope), or an empty list.
/// Boxes above `max_box_dim` dimensions are not enumerated.
inline std::vector<Point> vertices(const ConvexBody& body, std::size_t max_box_dim = 12) {
    if (const auto* poly = body.as<Polytope>()) {
        if (poly->segment) {
            if (poly->segment->first == poly->segment->second) return {poly->segment->first};
            return {poly->segment->first, poly->segment->second};
        }
        return poly->vertices;
    }
    if (const auto* box = body.as<Box>()) {
        const auto n = static_cast<std::size_t>(box->lo.size());
        if (n > max_box_dim) return {};
        std::vector<std::size_t> free_axes;
        for (std::size_t i = 0; i < n; ++i)
            if (box->lo[i] < box->hi[i]) free_axes.push_back(i);
        std::vector<Point> out;
        out.reserve(std::size_t{1} << free_axes.size());
        for (std::size_t mask = 0; mask < (std::size_t{1} << free_axes.size()); ++mask) {
            Point v = box->lo;
            for (std::size_t j = 0; j < free_axes.size(); ++j)
                if (mask & (std::size_t{1} << j)) v[free_axes[j]] = box->hi[free_axes[j]];
            out.push_back(std::move(v));
        }
        return out;
    }
    return {};
}

inline bool polytopal(const ConvexBody& body, std::size_t max_box_dim = 12) {
    if (body.as<Polytope>()) return true;
    if (const auto* box = body.as<Box>())
        return static_cast<std::size_t>(box->lo.size()) <= max_box_dim;
    return false;
}

/// Segment endpoints for bodies that are (possibly degenerate) segments.
inline std::optional<std::pair<Point, Point>> as_segment(const ConvexBody& body) {
    if (const auto* poly = body.as<Polytope>()) return poly->segment;
    return std::nullopt;
}

}  // namespace proxipair
