#pragma once

#include <initializer_list>
#include <memory>

#include "proxipair/proxipair.hpp"

namespace testing_util {

using namespace proxipair;

inline Point pt(std::initializer_list<double> xs) {
    Point p(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double v : xs) p[i++] = v;
    return p;
}

inline Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline const LpSpace& plane() {
    static const LpSpace s(2, 2.0);
    return s;
}

// Parallel segments [1,2] x {0} and [1,2] x {1}.
inline std::shared_ptr<const ProximityInstance> segments() {
    return ProximityInstance::create(ConvexBody::segment(plane(), pt({1, 0}), pt({2, 0})),
                                     ConvexBody::segment(plane(), pt({1, 1}), pt({2, 1})));
}

// Unit balls at (-2,0) and (2,0).
inline std::shared_ptr<const ProximityInstance> balls() {
    return ProximityInstance::create(ConvexBody::ball(plane(), pt({-2, 0}), 1.0),
                                     ConvexBody::ball(plane(), pt({2, 0}), 1.0));
}

// T(x,y) = (1 + (x-1)/2, 1 - y), cyclic.
inline MapSpec halving_swap(const std::shared_ptr<const ProximityInstance>& inst) {
    return MapSpec::affine("T", inst, mat2(0.5, 0, 0, -1), pt({0.5, 1}), Mode::cyclic);
}

// S(x,y) = (1 + (x-1)/2, y), noncyclic.
inline MapSpec halving(const std::shared_ptr<const ProximityInstance>& inst,
                       Mode mode = Mode::noncyclic) {
    return MapSpec::affine("S", inst, mat2(0.5, 0, 0, 1), pt({0.5, 0}), mode);
}

}  // namespace testing_util
