// Best proximity point of a cyclic contraction between two parallel segments.
#include <iostream>

#include "proxipair/proxipair.hpp"

using namespace proxipair;

int main() {
    const LpSpace space(2, 2.0);
    Point a0(2), a1(2), b0(2), b1(2);
    a0 << 1, 0;
    a1 << 2, 0;
    b0 << 1, 1;
    b1 << 2, 1;
    auto inst = ProximityInstance::create(ConvexBody::segment(space, a0, a1),
                                          ConvexBody::segment(space, b0, b1));

    // T(x, y) = (1 + (x - 1)/2, 1 - y) swaps the segments.
    Matrix m(2, 2);
    m << 0.5, 0, 0, -1;
    Point b(2);
    b << 0.5, 1;
    const MapSpec T = MapSpec::affine("T", inst, m, b, Mode::cyclic);

    const auto cert = certify_contraction(T);
    std::cout << "dist(A,B) = " << inst->dist() << ", alpha_hat = " << cert.alpha_hat << "\n";

    const SolveResult r = picard_cyclic(T, cert, a1);
    std::cout << "x* = (" << r.p.transpose() << ") after " << r.trace.iterations_used
              << " iterations, ||x* - Tx*|| - dist = " << r.residual << "\n";
    return r.converged() ? 0 : 1;
}
