#include <gtest/gtest.h>

#include <numbers>

#include <Eigen/Eigenvalues>

#include "qcr/errors.hpp"
#include "qcr/planner.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace qcr;
using qcr::test::Random;

namespace {

constexpr double kPi = std::numbers::pi;

DetectionEvent event(double intensity, double orientation) {
    DetectionEvent e;
    e.intensity = intensity;
    e.orientation = orientation;
    return e;
}

}  // namespace

TEST(RecoveryTarget, BacksOffOppositeCollision) {
    const Vec3 x = recovery_target(Vec3(0, 0, 1), Rotation{}, event(1.0, 0.0), 1.0);
    EXPECT_NEAR((x - Vec3(-1, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(RecoveryTarget, CollisionBehind) {
    const Vec3 x = recovery_target(Vec3::Zero(), Rotation{}, event(0.5, kPi), 1.0);
    EXPECT_NEAR((x - Vec3(0.5, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(RecoveryTarget, UsesBodyAttitude) {
    const Vec3 x = recovery_target(Vec3::Zero(), rot_z(kPi / 2), event(1.0, 0.0), 1.0);
    EXPECT_NEAR((x - Vec3(0, -1, 0)).norm(), 0.0, 1e-15);
}

TEST(RecoveryTarget, KeepsCollisionHeight) {
    Random rng(51);
    for (int i = 0; i < 200; ++i) {
        const Vec3 x0 = rng.vec(5);
        const double c = rng.uniform(0.1, 1.5), k = rng.uniform(0.2, 2);
        const Vec3 x = recovery_target(x0, rng.rotation(), event(c, rng.uniform(-kPi, kPi)), k);
        EXPECT_EQ(x.z(), x0.z());
        EXPECT_LE((x - x0).norm(), k * c + 1e-12);
    }
}

TEST(SnapHessian, QuarticHasConstantSnap) {
    Coeffs p = Coeffs::Zero();
    p(4) = 1.0;
    EXPECT_DOUBLE_EQ(p.dot(snap_hessian(1.0).Q * p), 576.0);
}

TEST(SnapHessian, CubicCostsNothing) {
    Random rng(52);
    Coeffs p = Coeffs::Zero();
    for (int k = 0; k < 4; ++k) p(k) = rng.uniform(-5, 5);
    EXPECT_EQ(p.dot(snap_hessian(2.3).Q * p), 0.0);
}

TEST(SnapHessian, MatchesTrapezoidQuadrature) {
    Random rng(53);
    for (int i = 0; i < 50; ++i) {
        Coeffs p;
        for (int k = 0; k < 10; ++k) p(k) = rng.uniform(-1, 1);
        const double T = rng.uniform(0.5, 3);
        const double exact = p.dot(snap_hessian(T).Q * p);
        EXPECT_LT(std::abs(exact - test::trapezoid_snap_cost(p, T)) / exact, 1e-6) << "T=" << T;
    }
}

TEST(SnapHessian, WeightScales) {
    const SnapMatrix a = snap_hessian(1.7).Q, b = snap_hessian(1.7, 2.5).Q;
    EXPECT_LT((b - 2.5 * a).cwiseAbs().maxCoeff(), 1e-9 * a.cwiseAbs().maxCoeff());
}

TEST(SnapHessian, PositiveSemidefiniteRankSix) {
    for (double T : {0.5, 1.0, 2.0, 5.0}) {
        const SnapMatrix q = snap_hessian(T).Q;
        EXPECT_EQ((q - q.transpose()).cwiseAbs().maxCoeff(), 0.0);
        const Eigen::SelfAdjointEigenSolver<SnapMatrix> es(q);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12) << "T=" << T;
        // The lower-right 6x6 block is a Gram matrix of independent functions.
        const Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(q.bottomRightCorner<6, 6>());
        EXPECT_EQ(llt.info(), Eigen::Success);
        EXPECT_EQ(q.topRows<4>().cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(MinSnap, ZeroProblemGivesZeroPolynomial) {
    const AxisSolution s = solve_min_snap_axis({0, 0, 0}, 1.3);
    EXPECT_LT(s.p.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(std::abs(s.cost), 1e-20);
}

TEST(MinSnap, RestToRestMatchesOracle) {
    const AxisSolution s = solve_min_snap_axis({0, 0, 1}, 1.0);
    const double oracle = test::nullspace_oracle_cost({0, 0, 1}, 1.0);
    EXPECT_GT(oracle, 0.0);
    EXPECT_LT(std::abs(s.cost - oracle) / oracle, 1e-9);
}

TEST(MinSnap, TranslationOnlyMovesConstantTerm) {
    const AxisSolution a = solve_min_snap_axis({0.2, 0.7, 1.5}, 1.4);
    const AxisSolution b = solve_min_snap_axis({3.2, 0.7, 4.5}, 1.4);
    EXPECT_NEAR(b.p(0) - a.p(0), 3.0, 1e-12);
    for (int k = 1; k < kPolyCoeffs; ++k) EXPECT_NEAR(b.p(k), a.p(k), 1e-9 * (1 + std::abs(a.p(k))));
    EXPECT_NEAR(a.cost, b.cost, 1e-9 * a.cost);
}

TEST(MinSnap, SatisfiesConstraintsAndStationarity) {
    Random rng(54);
    for (int i = 0; i < 100; ++i) {
        const AxisConstraints c{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        const double T = rng.uniform(0.5, 5);
        const AxisSolution s = solve_min_snap_axis(c, T);

        const ConstraintSystem cs = constraint_system(c, T);
        EXPECT_LE((cs.A * s.p - cs.b).cwiseAbs().maxCoeff(), 1e-8);

        // Normalized-time KKT: 2 Q c + A^T lambda = 0.
        const ConstraintSystem cn = constraint_system({c.x0, c.v0 * T, c.xd}, 1.0);
        const Coeffs grad = 2.0 * snap_hessian(1.0).Q * s.normalized + cn.A.transpose() * s.multipliers;
        EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-6);

        const double oracle = test::nullspace_oracle_cost(c, T);
        EXPECT_LE(std::abs(s.cost - oracle), 1e-6 * std::max(oracle, 1e-12));
        EXPECT_LE(std::abs(s.cost - s.p.dot(snap_hessian(T).Q * s.p)), 1e-6 * std::max(s.cost, 1e-12));
    }
}

TEST(MinSnap, NullspacePerturbationsNeverHelp) {
    Random rng(55);
    const AxisConstraints c{0.3, -1.2, 1.1};
    const double T = 1.7;
    const AxisSolution s = solve_min_snap_axis(c, T);
    const ConstraintSystem cs = constraint_system(c, T);
    const Eigen::FullPivLU<Eigen::Matrix<double, 5, 10>> lu(cs.A);
    const Eigen::MatrixXd N = lu.kernel();
    ASSERT_EQ(N.cols(), 5);
    const SnapMatrix q = snap_hessian(T).Q;
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXd z(5);
        for (int k = 0; k < 5; ++k) z(k) = rng.uniform(-1, 1);
        const Coeffs p = s.p + N * z * std::pow(10.0, rng.uniform(-6, 0));
        EXPECT_GE(p.dot(q * p), s.cost * (1 - 1e-12));
    }
}

TEST(MinSnap, DegenerateCostIsRejected) {
    EXPECT_THROW(solve_min_snap_axis({0, 0, 1}, 1.0, 0.0), IllConditioned);
    EXPECT_THROW(solve_min_snap_axis({0, 0, 1}, 0.0), Error);
}

TEST(PolySegment, EndpointsReproduceConstraints) {
    Random rng(56);
    for (int i = 0; i < 100; ++i) {
        EndpointConstraints c{rng.vec(3), rng.vec(2), rng.vec(3)};
        const double T = rng.uniform(0.5, 5);
        const PolySegment seg = solve_min_snap(c, T, 0.4, 2.0);
        const FlatReference a = eval(seg, 0.0);
        const FlatReference b = eval(seg, T * (1 - 1e-15));
        EXPECT_LE((a.position - c.x0).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LE((a.velocity - c.v0).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LE((b.position - c.xd).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LE(b.velocity.cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LE(b.acceleration.cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_EQ(a.yaw, 0.4);
        EXPECT_EQ(a.yaw_rate, 0.0);
        EXPECT_EQ(seg.end_time(), 2.0 + T);
    }
}

TEST(PolySegment, HoldsTargetAfterEnd) {
    const EndpointConstraints c{Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(-1, 0.5, 1)};
    const PolySegment seg = solve_min_snap(c, 1.2);
    for (double t : {1.2, 1.5, 100.0}) {
        const FlatReference r = eval(seg, t);
        EXPECT_EQ(r.position, c.xd);
        EXPECT_EQ(r.velocity, Vec3::Zero());
        EXPECT_EQ(r.acceleration, Vec3::Zero());
    }
    EXPECT_EQ(eval(seg, -1.0).position, eval(seg, 0.0).position);
}

TEST(PolySegment, RawCoefficientsMatchAxisSolution) {
    const EndpointConstraints c{Vec3(0.1, 0.2, 1), Vec3(1, -1, 0), Vec3(-1, 0.5, 1)};
    const PolySegment seg = solve_min_snap(c, 2.2);
    for (int axis = 0; axis < 3; ++axis) {
        const Coeffs p = solve_min_snap_axis(c.axis(axis), 2.2).p;
        EXPECT_LE((seg.coefficients(axis) - p).cwiseAbs().maxCoeff(), 1e-15);
        // Horner in tau agrees with the expanded polynomial in t.
        double direct = 0.0;
        for (int k = 0; k < kPolyCoeffs; ++k) direct += p(k) * std::pow(0.9, k);
        EXPECT_NEAR(eval(seg, 0.9).position[axis], direct, 1e-12);
    }
}

TEST(TimeAllocation, Examples) {
    EXPECT_NEAR(time_allocation(Vec3::Zero(), Vec3(1, 0, 0), 2.0, 2.0), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(time_allocation(Vec3::Zero(), Vec3(1, 0, 0), 2.0, 2.0), 1.414, 5e-4);
    EXPECT_EQ(time_allocation(Vec3(1, 1, 1), Vec3(1, 1, 1), 2.0, 2.0), 0.5);
    EXPECT_NEAR(time_allocation(Vec3::Zero(), Vec3(0, 100, 0), 2.0, 2.0), 75.0, 1e-12);
    EXPECT_THROW(time_allocation(Vec3::Zero(), Vec3::UnitX(), 0.0, 1.0), Error);
}
