#include <gtest/gtest.h>

#include <numbers>

#include "qcr/errors.hpp"
#include "qcr/world.hpp"
#include "support.hpp"

using namespace qcr;
using qcr::test::Random;

namespace {

constexpr double kPi = std::numbers::pi;

const Wall kWallAhead{Vec3(1, 0, 0), Vec3(-1, 0, 0)};

// Pose with arm `arm` pointing along world +x and its tip `depth` into a
// wall whose face is at x = 1.
RigidState pressing_arm(int arm, double depth, const VehicleParams& p) {
    RigidState s;
    s.attitude = rot_z(-p.arm_azimuths[static_cast<std::size_t>(arm)]);
    s.position = Vec3(1.0 - kCageHalfSpan - 0.02 + depth, 0, 1);
    return s;
}

}  // namespace

TEST(Penetration, FarFromWall) {
    const Penetration p = penetration(Vec3(2, 0, 0), 0.05, Wall{Vec3(3, 0, 0), Vec3(-1, 0, 0)});
    EXPECT_EQ(p.depth, 0.0);
}

TEST(Penetration, OnWallPlane) {
    const Penetration p = penetration(Vec3(3, 0.4, 1), 0.05, Wall{Vec3(3, 0, 0), Vec3(-1, 0, 0)});
    EXPECT_DOUBLE_EQ(p.depth, 0.05);
    EXPECT_EQ(p.normal, Vec3(-1, 0, 0));
}

TEST(Penetration, PoleRadial) {
    const Pole pole{Vec3(0, 0, 0), Vec3::UnitZ(), 0.15};
    const Penetration p = penetration(Vec3(0, 0.17, 4), 0.05, pole);
    EXPECT_NEAR(p.depth, 0.03, 1e-15);
    EXPECT_NEAR((p.normal - Vec3::UnitY()).norm(), 0.0, 1e-15);
}

TEST(Penetration, UnionTakesDeepest) {
    Unstructured u;
    u.planes.push_back({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
    u.spheres.push_back({Vec3(0.9, 0, 0), 0.1});
    const Penetration p = penetration(Vec3(0.8, 0, 0), 0.05, u);
    EXPECT_NEAR(p.depth, 0.05, 1e-15);
    const Penetration q = penetration(Vec3(0.99, 0, 0), 0.05, u);
    EXPECT_NEAR(q.depth, 0.06, 1e-15);  // plane 0.04, sphere 0.06
    EXPECT_NEAR((p.normal - Vec3(-1, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(penetration(Vec3(0, 0, 0), 0.05, u).depth, 0.0);
}

TEST(Penetration, GroundIsHorizontalPlane) {
    const Penetration p = penetration(Vec3(5, -2, 0.01), 0.02, Ground{});
    EXPECT_NEAR(p.depth, 0.01, 1e-15);
    EXPECT_EQ(p.normal, Vec3::UnitZ());
}

TEST(Penetration, ValidationRejectsBadGeometry) {
    EXPECT_THROW(validate(Wall{Vec3::Zero(), Vec3(1, 1, 0)}), ConfigError);
    EXPECT_THROW(validate(Pole{Vec3::Zero(), Vec3::UnitZ(), 0.0}), ConfigError);
    Unstructured u;
    u.spheres.push_back({Vec3::Zero(), -0.1});
    EXPECT_THROW(validate(u), ConfigError);
    EXPECT_NO_THROW(validate(Ground{}));
}

TEST(Cage, TipsAlongArms) {
    const VehicleParams p;
    const auto tips = cage_tips(p);
    ASSERT_EQ(tips.size(), 4u);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(tips[static_cast<std::size_t>(i)].arm, i);
        EXPECT_NEAR(tips[static_cast<std::size_t>(i)].offset.norm(), kCageHalfSpan, 1e-15);
        EXPECT_EQ(nearest_arm(tips[static_cast<std::size_t>(i)].offset, p), i);
    }
}

TEST(Contact, NoPenetrationNoWrench) {
    const VehicleParams p;
    RigidState s;
    s.velocity = Vec3(3, 0, 0);
    const ContactResult c = contact_wrench(s, p, cage_tips(p), {Obstacle{kWallAhead}}, {});
    EXPECT_EQ(c.wrench.force, Vec3::Zero());
    EXPECT_EQ(c.wrench.torque, Vec3::Zero());
    for (double a : c.axial) EXPECT_EQ(a, 0.0);
    EXPECT_EQ(c.max_depth, 0.0);
}

TEST(Contact, HeadOnLoadsOneArm) {
    const VehicleParams p;
    for (int arm = 0; arm < 4; ++arm) {
        const ContactResult c = contact_wrench(pressing_arm(arm, 0.01, p), p, cage_tips(p), {Obstacle{kWallAhead}}, {});
        for (int i = 0; i < 4; ++i) {
            if (i == arm) EXPECT_NEAR(c.axial[static_cast<std::size_t>(i)], 50.0, 1e-9);
            else EXPECT_NEAR(c.axial[static_cast<std::size_t>(i)], 0.0, 1e-12);
        }
        EXPECT_NEAR(c.wrench.torque.norm(), 0.0, 1e-12);
        EXPECT_NEAR((c.wrench.force - Vec3(-50, 0, 0)).norm(), 0.0, 1e-9);
    }
}

TEST(Contact, DampingOnlyWhileApproaching) {
    const VehicleParams p;
    RigidState s = pressing_arm(0, 0.01, p);
    s.velocity = Vec3(0.4, 0, 0);
    EXPECT_NEAR(contact_wrench(s, p, cage_tips(p), {Obstacle{kWallAhead}}, {}).axial[0], 50.0 + 50.0 * 0.4, 1e-9);
    s.velocity = Vec3(-0.4, 0, 0);
    EXPECT_NEAR(contact_wrench(s, p, cage_tips(p), {Obstacle{kWallAhead}}, {}).axial[0], 50.0, 1e-9);
}

TEST(Contact, SymmetricTwoArmHit) {
    // Arms 0 and 1 straddle body +x, so flying straight at the wall loads both.
    const VehicleParams p;
    RigidState s;
    s.position = Vec3(1.0 - kCageHalfSpan * std::cos(kPi / 4) - 0.02 + 0.008, 0, 1);
    s.velocity = Vec3(1.9, 0, 0);
    const ContactResult c = contact_wrench(s, p, cage_tips(p), {Obstacle{kWallAhead}}, {});
    ASSERT_GT(c.axial[0], 0.0);
    EXPECT_LT(std::abs(c.axial[0] - c.axial[1]) / c.axial[0], 0.05);
    EXPECT_EQ(c.axial[2], 0.0);
    EXPECT_EQ(c.axial[3], 0.0);
}

TEST(Contact, NeverAdhesiveAndArmsOnlyCompress) {
    const VehicleParams p;
    Random rng(61);
    const std::vector<Obstacle> obstacles{Obstacle{kWallAhead}, Obstacle{Pole{Vec3(0, 1, 0), Vec3::UnitZ(), 0.15}},
                                          Obstacle{Ground{}}};
    for (int i = 0; i < 2000; ++i) {
        RigidState s;
        s.position = Vec3(rng.uniform(0.4, 1.0), rng.uniform(0.4, 1.0), rng.uniform(0.0, 0.3));
        s.velocity = rng.vec(3);
        s.omega = rng.vec(5);
        s.attitude = rng.rotation();
        const ContactResult c = contact_wrench(s, p, cage_tips(p), obstacles, {});
        for (double a : c.axial) EXPECT_GE(a, 0.0);
        // Per point force along the outward normal of a single obstacle.
        for (const ContactPoint& cp : cage_tips(p)) {
            for (const Obstacle& o : obstacles) {
                const ContactResult one = contact_wrench(s, p, {cp}, {o}, {});
                const Penetration pen = penetration(s.position + s.attitude.matrix() * cp.offset, cp.radius, o);
                EXPECT_GE(one.wrench.force.dot(pen.normal), 0.0);
                if (pen.depth == 0.0) EXPECT_EQ(one.wrench.force, Vec3::Zero());
            }
        }
    }
}

TEST(Contact, ElasticBounceDoesNotGainEnergy) {
    const VehicleParams p;
    const auto tips = cage_tips(p);
    const std::vector<Obstacle> obstacles{Obstacle{kWallAhead}};
    for (double damping : {0.0, 50.0}) {
        const ContactParams cp{5000.0, damping};
        RigidState s = pressing_arm(0, -0.05, p);
        s.velocity = Vec3(1.5, 0, 0);
        const WrenchCommand hover{p.weight(), Vec3::Zero()};
        const ExternalWrenchFn fn = [&](const RigidState& x) { return contact_wrench(x, p, tips, obstacles, cp).wrench; };
        const double before = mechanical_energy(s, p);
        double peak_depth = 0.0;
        for (int k = 0; k < 400; ++k) {
            s = step(s, hover, fn, p, 1e-3);
            peak_depth = std::max(peak_depth, contact_wrench(s, p, tips, obstacles, cp).max_depth);
        }
        ASSERT_LT(s.velocity.x(), 0.0) << "did not rebound";
        ASSERT_GT(peak_depth, 0.0);
        const double after = mechanical_energy(s, p);
        EXPECT_LE(after, before * 1.01) << "damping " << damping;
        if (damping > 0.0) EXPECT_LT(after, before);
    }
}

TEST(Impulse, ArmSpeedFromMomentum) {
    const VehicleParams p;
    RigidState s;
    s.position = Vec3(0, 0, 1);
    const RigidState out = apply_impulse(s, {0.0, Vec3(1.845, 0, 0), Vec3::Zero(), 0.0}, p);
    EXPECT_NEAR(out.velocity.x(), 1.3, 1e-3);
    EXPECT_DOUBLE_EQ(out.velocity.x(), 1.845 / 1.419);
    EXPECT_EQ(out.position, s.position);
    EXPECT_EQ(out.omega, Vec3::Zero());
}

TEST(Impulse, ZeroImpulseIsIdentity) {
    const VehicleParams p;
    Random rng(62);
    RigidState s;
    s.position = rng.vec();
    s.velocity = rng.vec();
    s.omega = rng.vec();
    s.attitude = rng.rotation();
    const RigidState out = apply_impulse(s, {0.0, Vec3::Zero(), Vec3(0.2, 0.1, 0), 0.0}, p);
    EXPECT_EQ(out.velocity, s.velocity);
    EXPECT_EQ(out.omega, s.omega);
    EXPECT_EQ(out.attitude.matrix(), s.attitude.matrix());
}

TEST(Impulse, OffsetSpinsAboutExpectedAxis) {
    const VehicleParams p;
    RigidState s;
    s.attitude = rot_z(0.3);
    const ImpulseEvent e{0.0, Vec3(0.2, -0.5, 0.1), Vec3(0.2, 0.1, -0.05), 0.0};
    const RigidState out = apply_impulse(s, e, p);
    const Vec3 expected = p.inertia.inverse() * e.offset.cross(s.attitude.transpose() * e.impulse);
    EXPECT_NEAR((out.omega - expected).norm(), 0.0, 1e-12);
}

TEST(Impulse, PulseIntegratesToImpulse) {
    const VehicleParams p;
    RigidState s;
    s.attitude = rot_z(0.7);
    const ImpulseEvent e{2.0, Vec3(-1.304388, 1.304388, 0), Vec3(0.208597, -0.208597, 0), 0.04};
    const int n = 4000;
    const double h = (e.duration + 0.02) / n;
    Vec3 total = Vec3::Zero();
    for (int i = 0; i < n; ++i) total += impulse_pulse(s, e, 1.99 + (i + 0.5) * h, p).wrench.force * h;
    EXPECT_LT((total - e.impulse).norm(), 1e-6);
    EXPECT_EQ(impulse_pulse(s, e, 1.999, p).wrench.force, Vec3::Zero());
    EXPECT_EQ(impulse_pulse(s, e, 2.04, p).wrench.force, Vec3::Zero());
}

TEST(Impulse, PulseAlongArmCompressesThatArm) {
    const VehicleParams p;
    RigidState s;
    const Vec3 u = p.arm_direction(3);
    const ImpulseEvent e{0.0, -1.8 * u, 0.3 * u, 0.04};
    const ContactResult c = impulse_pulse(s, e, 0.02, p);
    EXPECT_NEAR(c.axial[3], 1.8 * kPi / (2 * 0.04), 1e-9);
    EXPECT_EQ(c.axial[0] + c.axial[1] + c.axial[2], 0.0);
    EXPECT_NEAR(c.wrench.torque.norm(), 0.0, 1e-12);
}

TEST(Unstructured, SeededAndBounded) {
    const Wall base{Vec3(2.8, 0, 1), Vec3(-1, 0, 0)};
    const Unstructured a = make_unstructured(base, 7, 20, 0.6, 0.04, 0.12);
    EXPECT_EQ(a, make_unstructured(base, 7, 20, 0.6, 0.04, 0.12));
    EXPECT_NE(a, make_unstructured(base, 8, 20, 0.6, 0.04, 0.12));
    ASSERT_EQ(a.planes.size(), 1u);
    EXPECT_EQ(a.planes[0], base);
    ASSERT_EQ(a.spheres.size(), 20u);
    for (const Sphere& s : a.spheres) {
        EXPECT_GE(s.radius, 0.04);
        EXPECT_LE(s.radius, 0.12);
        const Vec3 rel = s.center - base.point;
        const double height = rel.dot(base.normal);
        EXPECT_GE(height + s.radius, -1e-12);  // protrudes from the face
        EXPECT_LE(height, 0.5 * s.radius + 1e-12);
        EXPECT_LE(std::abs(rel.y()), 0.6 + 1e-12);
        EXPECT_LE(std::abs(rel.z()), 0.6 + 1e-12);
    }
    EXPECT_NO_THROW(validate(Obstacle{a}));
}
