// Randomized properties of projections, distances and the proximal projector.

#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "proxipair/harness/fixtures.hpp"

using namespace proxipair;
using testing_util::pt;

namespace {

ConvexBody random_body(const LpSpace& s, std::mt19937_64& rng, int kind) {
    std::uniform_real_distribution<double> u(-2.0, 2.0), r(0.3, 1.5);
    const auto n = static_cast<Eigen::Index>(s.dim());
    Point c(n), h(n);
    for (Eigen::Index i = 0; i < n; ++i) c[i] = u(rng), h[i] = r(rng);
    if (kind == 0) return ConvexBody::ball(s, c, r(rng));
    return ConvexBody::box(s, c - h, c + h);
}

Point random_point(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Point x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = u(rng);
    return x;
}

}  // namespace

class ProjectionProperties : public ::testing::TestWithParam<double> {};

TEST_P(ProjectionProperties, IdempotentAndNearest) {
    const LpSpace s(3, GetParam());
    std::mt19937_64 rng(42);
    Rng srng(7);
    for (int t = 0; t < 40; ++t) {
        const ConvexBody K = random_body(s, rng, t % 2);
        const Point x = random_point(3, rng);
        const Point px = project(K, x);
        EXPECT_TRUE(contains(K, px, 1e-9));
        EXPECT_LE(distance(s, px, project(K, px)), 1e-9);
        // No sampled point of K is closer than the projection.
        const double d = distance(s, x, px);
        for (int i = 0; i < 50; ++i)
            EXPECT_GE(distance(s, x, sample_in(K, srng)), d - 1e-9);
    }
}

// Metric projections are nonexpansive in the Euclidean case only.
TEST(ProjectionProperties, NonexpansiveAtP2) {
    const LpSpace s(3, 2.0);
    std::mt19937_64 rng(43);
    for (int t = 0; t < 100; ++t) {
        const ConvexBody K = random_body(s, rng, t % 2);
        const Point x = random_point(3, rng), y = random_point(3, rng);
        EXPECT_LE(distance(s, project(K, x), project(K, y)), distance(s, x, y) + 1e-12);
    }
}

INSTANTIATE_TEST_SUITE_P(Exponents, ProjectionProperties, ::testing::Values(1.5, 2.0, 3.0));

TEST(ProjectionProperties, VariationalInequalityAtP2) {
    const LpSpace s(3, 2.0);
    std::mt19937_64 rng(44);
    Rng srng(8);
    for (int t = 0; t < 40; ++t) {
        const ConvexBody K = random_body(s, rng, t % 2);
        const Point x = random_point(3, rng);
        const Point px = project(K, x);
        for (int i = 0; i < 50; ++i) {
            const Point y = sample_in(K, srng);
            EXPECT_LE((x - px).dot(y - px), 1e-9);
        }
    }
}

TEST(ProjectionProperties, StrictConvexityUniqueNearestPoint) {
    // Midpoint of two nearest points would be strictly nearer; so a second
    // projection of a perturbed start lands on the same point.
    for (double p : {1.5, 3.0}) {
        const LpSpace s(2, p);
        const auto K = ConvexBody::box(s, pt({0, 0}), pt({1, 1}));
        const Point x = pt({2, 3});
        const Point a = project(K, x);
        const Point b = project(K, x + 1e-13 * pt({1, -1}));
        EXPECT_LE((a - b).norm(), 1e-9);
    }
}

TEST(DistanceProperties, LowerBoundBySampledPairs) {
    for (double p : {1.5, 2.0, 3.0}) {
        const LpSpace s(2, p);
        std::mt19937_64 rng(45);
        Rng srng(9);
        for (int t = 0; t < 20; ++t) {
            const ConvexBody A = random_body(s, rng, t % 2);
            ConvexBody B = random_body(s, rng, (t + 1) % 2);
            const auto inst = ProximityInstance::create(A, B);
            for (int i = 0; i < 50; ++i)
                EXPECT_GE(distance(s, sample_in(A, srng), sample_in(B, srng)), inst->dist() - 1e-9);
            EXPECT_NEAR(distance(s, inst->realizing_a(), inst->realizing_b()), inst->dist(), 1e-8);
        }
    }
}

TEST(DistanceProperties, GeneratedBoxesMatchPrescribedGap) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const double p = seed % 3 == 0 ? 1.5 : seed % 3 == 1 ? 2.0 : 3.0;
        const auto f = harness::generate_random_instance(seed, 3, p,
                                                         harness::Family::separated_boxes);
        const auto inst = ProximityInstance::create(f.A, f.B);
        EXPECT_NEAR(inst->dist(), *f.expected_dist, 1e-7) << f.name;
    }
}

TEST(ProjectorProperties, ProjectorIsInvolutiveOnGeneratedInstances) {
    for (double p : {1.5, 3.0}) {
        const auto f = harness::generate_random_instance(21, 2, p,
                                                         harness::Family::separated_boxes);
        const auto inst = ProximityInstance::create(f.A, f.B);
        const ProximalProjector P(inst);
        Rng rng(10);
        for (int i = 0; i < 100; ++i) {
            auto x = sample_proximal(*inst, Side::A, rng);
            ASSERT_TRUE(x.has_value());
            EXPECT_LE(distance(inst->space(), P(P(*x)), *x), 1e-8);
        }
    }
}
