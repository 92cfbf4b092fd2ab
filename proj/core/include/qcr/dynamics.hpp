// Rigid-body quadrotor model: control allocation and fixed-step integration.
#pragma once

#include <array>
#include <functional>
#include <numbers>

#include "qcr/math.hpp"

namespace qcr {

struct VehicleParams {
    double mass = 1.419;  // kg, with battery
    /// Not measured on hardware; an engineering placeholder.
    Mat3 inertia = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
    double gravity = 9.81;
    double arm_length = 0.19;     // m, hub to rotor
    double torque_coeff = 0.016;  // m, rotor drag torque per unit thrust
    double rotor_thrust_max = 2.0 * 1.419 * 9.81 / 4.0;
    double thrust_to_weight_cap = 2.0;
    /// Body-frame azimuth of each arm. Default is the X layout bisected by
    /// the body x axis (arms 1 and 2 straddle +x).
    std::array<double, 4> arm_azimuths = {-std::numbers::pi / 4, std::numbers::pi / 4,
                                          3 * std::numbers::pi / 4, -3 * std::numbers::pi / 4};

    double weight() const { return mass * gravity; }
    double max_collective_thrust() const { return thrust_to_weight_cap * weight(); }
    /// Unit vector along arm i in the body frame.
    Vec3 arm_direction(int i) const;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    bool operator==(const VehicleParams&) const = default;
};

struct RigidState {
    Vec3 position = Vec3::Zero();  // world, m
    Vec3 velocity = Vec3::Zero();  // world, m/s
    Rotation attitude;             // body -> world
    Vec3 omega = Vec3::Zero();     // body, rad/s

    bool finite() const;
};

struct WrenchCommand {
    double thrust = 0.0;          // N along body z
    Vec3 moment = Vec3::Zero();   // body, N m
};

struct RotorThrusts {
    std::array<double, 4> f{};
};

struct AllocationResult {
    RotorThrusts thrusts;
    bool saturated = false;
};

/// External contact wrench: force in world frame, torque in body frame.
struct ExternalWrench {
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();
};

struct StateDerivative {
    Vec3 position;
    Vec3 velocity;
    Mat3 attitude;
    Vec3 omega;
};

/// Rotor thrusts -> collective thrust and body moments:
///   f  = f1 + f2 + f3 + f4
///   M1 = l (f2 - f4)
///   M2 = l (f3 - f1)
///   M3 = c (f1 - f2 + f3 - f4)
WrenchCommand allocate(const RotorThrusts& thrusts, const VehicleParams& params);

/// Exact inverse of allocate() followed by a per-rotor clamp to
/// [0, rotor_thrust_max]. `saturated` reports whether any rotor was clamped.
AllocationResult inverse_allocate(const WrenchCommand& cmd, const VehicleParams& params);

/// Wrench the vehicle can actually produce for `cmd`.
WrenchCommand achievable_wrench(const WrenchCommand& cmd, const VehicleParams& params);

StateDerivative derivative(const RigidState& state, const WrenchCommand& cmd,
                           const ExternalWrench& ext, const VehicleParams& params);

using ExternalWrenchFn = std::function<ExternalWrench(const RigidState&)>;

inline constexpr double kMaxStep = 0.01;

/// Classical RK4 step with the wrench held constant. The attitude is
/// re-projected onto SO(3) after the step. Throws NonFiniteState.
RigidState step(const RigidState& state, const WrenchCommand& cmd, const ExternalWrench& ext,
                const VehicleParams& params, double dt);

/// Same as above but re-evaluates the external wrench at every stage, which
/// keeps stiff penalty contacts from injecting energy.
RigidState step(const RigidState& state, const WrenchCommand& cmd, const ExternalWrenchFn& ext,
                const VehicleParams& params, double dt);

/// Explicit Euler step, kept for convergence comparisons.
RigidState euler_step(const RigidState& state, const WrenchCommand& cmd, const ExternalWrench& ext,
                      const VehicleParams& params, double dt);

/// Translational + rotational kinetic energy plus gravitational potential.
double mechanical_energy(const RigidState& state, const VehicleParams& params);

}  // namespace qcr
