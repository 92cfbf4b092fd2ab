// Obstacles, penalty contact and external impulse events.
#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "qcr/dynamics.hpp"
#include "qcr/math.hpp"

namespace qcr {

/// Solid half-space. `normal` points out of the solid, into free space.
struct Wall {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitX();

    bool operator==(const Wall&) const = default;
};

/// Infinite solid cylinder.
struct Pole {
    Vec3 axis_point = Vec3::Zero();
    Vec3 axis = Vec3::UnitZ();
    double radius = 0.15;

    bool operator==(const Pole&) const = default;
};

struct Sphere {
    Vec3 center = Vec3::Zero();
    double radius = 0.1;

    bool operator==(const Sphere&) const = default;
};

/// Irregular surface: union of half-spaces and spheres.
struct Unstructured {
    std::vector<Wall> planes;
    std::vector<Sphere> spheres;

    bool operator==(const Unstructured&) const = default;
};

/// The z = 0 plane.
struct Ground {
    bool operator==(const Ground&) const = default;
};

using Obstacle = std::variant<Wall, Pole, Unstructured, Ground>;

/// Throws ConfigError on non-unit normals/axes or non-positive radii.
void validate(const Obstacle& obstacle);

struct Penetration {
    double depth = 0.0;
    Vec3 normal = Vec3::Zero();  // unit, pointing from the obstacle to the point
};

/// Overlap of a sphere of radius `radius` at `point` with the obstacle. A
/// union takes the deepest primitive.
Penetration penetration(const Vec3& point, double radius, const Obstacle& obstacle);

/// Rigid point of the protective cage that can touch obstacles.
struct ContactPoint {
    int arm = 0;                 // arm whose absorber carries the load
    Vec3 offset = Vec3::Zero();  // body frame, m
    double radius = 0.02;        // m
};

inline constexpr double kCageHalfSpan = 0.295;  // m, cage tip to centre

/// One contact point at each cage tip, along each arm.
std::vector<ContactPoint> cage_tips(const VehicleParams& params, double half_span = kCageHalfSpan,
                                    double radius = 0.02);

/// Index of the arm whose direction is closest to `offset` in the body xy plane.
int nearest_arm(const Vec3& offset, const VehicleParams& params);

struct ContactParams {
    double stiffness = 5000.0;  // N/m
    double damping = 50.0;      // N s/m

    bool operator==(const ContactParams&) const = default;
};

struct ContactResult {
    ExternalWrench wrench;
    std::array<double, 4> axial{};  // compressive load along each arm, N
    double max_depth = 0.0;
};

/// Per point F = (k depth + c max(0, -v_n)) n where v_n is the point velocity
/// along the contact normal. Forces are summed into a world-frame force and a
/// body-frame torque; the body-frame load at each point is projected onto its
/// arm and only compression is reported.
ContactResult contact_wrench(const RigidState& state, const VehicleParams& params,
                             const std::vector<ContactPoint>& points,
                             const std::vector<Obstacle>& obstacles, const ContactParams& contact);

/// Momentum delivered to the vehicle at `time`. With a positive duration the
/// impulse is spread over a half-sine force pulse instead of being applied
/// instantaneously.
struct ImpulseEvent {
    double time = 0.0;
    Vec3 impulse = Vec3::Zero();  // world, N s
    Vec3 offset = Vec3::Zero();   // body-frame application point, m
    double duration = 0.0;        // s

    bool operator==(const ImpulseEvent&) const = default;
};

/// v += p / m; Omega += J^-1 (r x R^T p). Position and attitude unchanged.
RigidState apply_impulse(const RigidState& state, const ImpulseEvent& event,
                         const VehicleParams& params);

/// Force and arm loads of a finite-duration impulse at time t. Zero outside
/// [time, time + duration).
ContactResult impulse_pulse(const RigidState& state, const ImpulseEvent& event, double t,
                            const VehicleParams& params);

/// Half-space studded with `count` spheres placed on a patch of the plane,
/// drawn from a seeded generator.
Unstructured make_unstructured(const Wall& base, std::uint64_t seed, int count, double patch_half_width,
                               double min_radius, double max_radius);

}  // namespace qcr
