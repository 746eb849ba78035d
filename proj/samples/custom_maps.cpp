// Noncyclic contraction on two l3 boxes, solved directly and through the
// reduction to the cyclic map T o P.
#include <cmath>
#include <iostream>

#include "proxipair/proxipair.hpp"

using namespace proxipair;

int main() {
    const LpSpace space(2, 3.0);
    Point lo_a(2), hi_a(2), lo_b(2), hi_b(2);
    lo_a << 0, 0;
    hi_a << 1, 1;
    lo_b << 3, 0;
    hi_b << 4, 1;
    auto inst = ProximityInstance::create(ConvexBody::box(space, lo_a, hi_a),
                                          ConvexBody::box(space, lo_b, hi_b));

    // Halve the distance to the realizing point of each side.
    const Point& a = inst->realizing_a();
    const Point& b = inst->realizing_b();
    const Matrix half = 0.5 * Matrix::Identity(2, 2);
    const MapSpec T = MapSpec::piecewise("H", inst, {half, 0.5 * a}, {half, 0.5 * b},
                                         Mode::noncyclic);

    const ProximalProjector P(inst);
    std::cout << "projector properties hold: " << verify_projector_properties(P).all_hold()
              << ", commutation deviation: " << check_commutation(T, P).max_deviation << "\n";

    Point x0(2);
    x0 << 1, 0.1;
    const auto direct = noncyclic_projection_iteration(T, x0);
    const auto reduced = solve_noncyclic_via_reduction(T, x0);
    std::cout << "direct  p = (" << direct.p.transpose() << "), q = (" << direct.q->transpose()
              << ")\n";
    std::cout << "reduced p = (" << reduced.p.transpose() << "), q = ("
              << reduced.q->transpose() << ")\n";
    const double gap = norm(space, direct.p - reduced.p);
    return direct.converged() && reduced.converged() && gap < 1e-6 ? 0 : 1;
}
