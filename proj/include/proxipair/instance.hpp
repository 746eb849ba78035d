#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>

#include "proxipair/body.hpp"
#include "proxipair/error.hpp"
#include "proxipair/space.hpp"

namespace proxipair {

struct DistanceResult {
    double dist;
    Point a;
    Point b;
    bool converged;
    std::size_t iterations;
};

/// dist(A, B) by alternating projections a <- P_A(b), b <- P_B(a), started
/// from the projection of A's witness onto B. Stops once successive a-iterates
/// move less than `tol`; on hitting `max_iter` the best pair so far is
/// returned with `converged == false`.
inline DistanceResult distance_between(const ConvexBody& A, const ConvexBody& B,
                                       double tol = 1e-9, std::size_t max_iter = 100000) {
    if (!(A.space() == B.space())) throw InvalidArgument("A and B live in different spaces");
    const LpSpace& space = A.space();
    ProjectionOptions popts{tol, max_iter};

    Point b = project(B, A.witness(), popts);
    Point a = project(A, b, popts);
    b = project(B, a, popts);
    DistanceResult best{distance(space, a, b), a, b, false, 1};
    for (std::size_t it = 1; it < max_iter; ++it) {
        Point a_next = project(A, b, popts);
        Point b_next = project(B, a_next, popts);
        const double step = distance(space, a, a_next);
        a = std::move(a_next);
        b = std::move(b_next);
        const double gap = distance(space, a, b);
        if (gap <= best.dist) best = {gap, a, b, false, it + 1};
        if (step < tol) return {gap, a, b, true, it + 1};
    }
    best.iterations = max_iter;
    return best;
}

/// A pair (A, B) of convex bodies in one space together with dist(A, B) and a
/// pair realizing it. Computed once at construction; immutable afterwards.
class ProximityInstance {
public:
    static std::shared_ptr<const ProximityInstance> create(ConvexBody A, ConvexBody B,
                                                           double tol = 1e-9,
                                                           std::size_t max_iter = 100000) {
        if (!(A.space() == B.space())) throw InvalidArgument("A and B live in different spaces");
        if (!(tol > 0.0)) throw InvalidArgument("tol: must be positive");
        auto d = distance_between(A, B, tol, max_iter);
        if (!d.converged)
            throw NotConverged("alternating projections for dist(A,B) hit the iteration cap",
                               d.dist);
        return std::shared_ptr<const ProximityInstance>(new ProximityInstance(
            std::move(A), std::move(B), d.dist, std::move(d.a), std::move(d.b), tol));
    }

    const LpSpace& space() const noexcept { return A_.space(); }
    const ConvexBody& A() const noexcept { return A_; }
    const ConvexBody& B() const noexcept { return B_; }
    const ConvexBody& body(Side s) const noexcept { return s == Side::A ? A_ : B_; }
    double dist() const noexcept { return dist_; }
    const Point& realizing_a() const noexcept { return a_star_; }
    const Point& realizing_b() const noexcept { return b_star_; }
    double tol() const noexcept { return tol_; }
    bool bounded() const noexcept { return A_.bounded() && B_.bounded(); }

    double norm_dist(const Point& x, const Point& y) const { return distance(space(), x, y); }

private:
    ProximityInstance(ConvexBody A, ConvexBody B, double dist, Point a, Point b, double tol)
        : A_(std::move(A)), B_(std::move(B)), dist_(dist), a_star_(std::move(a)),
          b_star_(std::move(b)), tol_(tol) {}

    ConvexBody A_;
    ConvexBody B_;
    double dist_;
    Point a_star_;
    Point b_star_;
    double tol_;
};

/// Distance from x to the body opposite `side`, minus dist(A, B).
inline double proximal_excess(const ProximityInstance& inst, const Point& x, Side side) {
    return distance_to(inst.body(opposite(side)), x) - inst.dist();
}

/// Whether x (a point of the declared side) belongs to that side's proximal
/// set A0 or B0, i.e. realizes dist(A, B) against the opposite body within
/// `slack` (defaults to the instance tolerance).
inline bool proximal_membership(const ProximityInstance& inst, const Point& x, Side side,
                                double slack = -1.0) {
    if (slack < 0.0) slack = inst.tol();
    if (!contains(inst.body(side), x, inst.tol()))
        throw DomainError(std::string("point is not in side ") + to_string(side) +
                          " (distance " + std::to_string(distance_to(inst.body(side), x)) + ")");
    return proximal_excess(inst, x, side) <= slack;
}

}  // namespace proxipair
