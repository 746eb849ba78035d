#include <gtest/gtest.h>

#include "common.hpp"

using namespace proxipair;
using namespace testing_util;

TEST(ProximalProject, SegmentPointGoesStraightAcross) {
    const ProximalProjector P(segments());
    EXPECT_TRUE(P(pt({1.5, 0})).isApprox(pt({1.5, 1})));
    EXPECT_TRUE(P(pt({1.2, 1})).isApprox(pt({1.2, 0})));
}

TEST(ProximalProject, BallRealizingPoints) {
    const ProximalProjector P(balls());
    EXPECT_NEAR((P(pt({-1, 0})) - pt({1, 0})).norm(), 0.0, 1e-9);
    EXPECT_NEAR((P(pt({1, 0})) - pt({-1, 0})).norm(), 0.0, 1e-9);
}

TEST(ProximalProject, Involution) {
    const ProximalProjector P(segments());
    for (double x : {1.0, 1.3, 1.77, 2.0}) {
        const Point a = pt({x, 0});
        EXPECT_NEAR((P(P(a)) - a).norm(), 0.0, 1e-12);
    }
}

TEST(ProximalProject, RejectsPointsOutsideProximalSets) {
    const ProximalProjector P(balls());
    EXPECT_THROW(P(pt({-3, 0})), DomainError);  // in A, not in A0
    EXPECT_THROW(P(pt({0, 0})), DomainError);   // in neither body
}

TEST(ProjectorProperties, SegmentsHoldAndAreNotDegenerate) {
    const auto rep = verify_projector_properties(ProximalProjector(segments()));
    EXPECT_TRUE(rep.all_hold());
    EXPECT_FALSE(rep.degenerate);
    EXPECT_LE(rep.isometry.worst_deviation, 1e-8);
}

TEST(ProjectorProperties, BallsAreDegenerate) {
    const auto rep = verify_projector_properties(ProximalProjector(balls()));
    EXPECT_TRUE(rep.all_hold());
    EXPECT_TRUE(rep.degenerate);
    EXPECT_NE(rep.isometry.note.find("degenerate"), std::string::npos);
}

TEST(ProjectorProperties, BoxesInL3) {
    const LpSpace s(2, 3.0);
    const auto inst = ProximityInstance::create(ConvexBody::box(s, pt({0, 0}), pt({1, 1})),
                                                ConvexBody::box(s, pt({3, 0}), pt({4, 1})));
    EXPECT_NEAR(inst->dist(), 2.0, 1e-9);
    const ProximalProjector P(inst);
    // A0 is the right edge, B0 the left edge; P translates by (+-2, 0).
    EXPECT_TRUE(P(pt({1, 0.25})).isApprox(pt({3, 0.25}), 1e-9));
    const auto rep = verify_projector_properties(P);
    EXPECT_TRUE(rep.all_hold());
    EXPECT_FALSE(rep.degenerate);
}

TEST(Compose, CyclicOuterGivesNoncyclicComposition) {
    const auto inst = segments();
    const ProximalProjector P(inst);
    const auto TP = compose_with_projector(halving_swap(inst), P);
    EXPECT_EQ(TP.mode(), Mode::noncyclic);
    for (double x : {1.0, 1.4, 2.0}) {
        // T(P(x,0)) = T(x,1) = (1 + (x-1)/2, 0)
        EXPECT_TRUE(TP.apply(pt({x, 0})).isApprox(pt({1 + (x - 1) / 2, 0})));
    }
    EXPECT_TRUE(TP.nonexpansive().holds);
}

TEST(Compose, NoncyclicOuterGivesCyclicComposition) {
    const auto inst = segments();
    const auto SP = compose_with_projector(halving(inst), ProximalProjector(inst));
    EXPECT_EQ(SP.mode(), Mode::cyclic);
    for (double x : {1.0, 1.4, 2.0})
        EXPECT_TRUE(SP.apply(pt({x, 0})).isApprox(pt({1 + (x - 1) / 2, 1})));
    EXPECT_TRUE(certify_mode(SP).holds);
}

TEST(Compose, IdentityOuterEqualsProjector) {
    const auto inst = segments();
    const ProximalProjector P(inst);
    const auto IP = compose_with_projector(MapSpec::identity("I", inst), P);
    for (double x : {1.0, 1.6, 2.0}) {
        EXPECT_EQ(IP.apply(pt({x, 0})), P(pt({x, 0})));
        EXPECT_EQ(IP.apply(pt({x, 1})), P(pt({x, 1})));
    }
}

TEST(Compose, RejectsExpandingOuter) {
    const auto inst = segments();
    const auto D = MapSpec::affine("D", inst, mat2(2, 0, 0, 1), pt({-1, 0}), Mode::noncyclic);
    EXPECT_THROW(compose_with_projector(D, ProximalProjector(inst)), DomainError);
}

TEST(Compose, RejectsOtherInstance) {
    EXPECT_THROW(compose_with_projector(halving(segments()), ProximalProjector(segments())),
                 InvalidArgument);
}

TEST(Commutation, AffineHalvingCommutes) {
    const auto inst = segments();
    const auto rep = check_commutation(halving(inst), ProximalProjector(inst));
    EXPECT_LE(rep.max_deviation, 1e-12);
    EXPECT_GT(rep.checked, 0u);
}

TEST(Commutation, IdentityAndConstantCommute) {
    const auto inst = balls();
    const ProximalProjector P(inst);
    EXPECT_EQ(check_commutation(MapSpec::identity("I", inst), P).max_deviation, 0.0);
    const auto K = MapSpec::piecewise("K", inst, {Matrix::Zero(2, 2), inst->realizing_a()},
                                      {Matrix::Zero(2, 2), inst->realizing_b()}, Mode::noncyclic);
    EXPECT_LE(check_commutation(K, P).max_deviation, 1e-9);
}

TEST(Commutation, SkewedBlackboxFailsWithWitness) {
    const auto inst = segments();
    // Contracts A toward (1,0) by 1/2 but B toward (1,1) by 1/4.
    const auto R = MapSpec::blackbox(
        "R", inst,
        [](const Point& x) {
            const double k = x[1] > 0.5 ? 0.25 : 0.5;
            return pt({1 + k * (x[0] - 1), x[1]});
        },
        Mode::noncyclic);
    const auto rep = check_commutation(R, ProximalProjector(inst));
    ASSERT_TRUE(rep.witness.has_value());
    // Oracle: at (x, 0), T(Px) = (1 + (x-1)/4, 1) and P(Tx) = (1 + (x-1)/2, 1).
    const double x = (*rep.witness)[0];
    EXPECT_NEAR(rep.max_deviation, std::abs(x - 1) / 4, 1e-12);
    EXPECT_NEAR(rep.max_deviation, 0.25, 1e-3);
}

TEST(Preservation, ReportsWitnessWhenImageLeavesProximalSet) {
    const auto inst = balls();
    // Rotating A about its centre moves the realizing point off A0.
    const auto Rot = MapSpec::piecewise("Rot", inst, {mat2(0, -1, 1, 0), pt({-2, 2})},
                                        {Matrix::Identity(2, 2), pt({0, 0})}, Mode::noncyclic);
    const auto rep = check_proximal_preservation(Rot);
    EXPECT_FALSE(rep.holds);
    ASSERT_TRUE(rep.witness.has_value());
    EXPECT_EQ(rep.witness_side, Side::A);
}
