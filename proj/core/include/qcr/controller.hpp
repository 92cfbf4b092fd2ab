// Geometric tracking controller on SE(3).
#pragma once

#include <optional>

#include "qcr/dynamics.hpp"
#include "qcr/math.hpp"

namespace qcr {

/// Differentially flat reference: position and its first two derivatives plus yaw.
struct FlatReference {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 acceleration = Vec3::Zero();
    double yaw = 0.0;
    double yaw_rate = 0.0;

    static FlatReference hold(const Vec3& position, double yaw) {
        FlatReference r;
        r.position = position;
        r.yaw = yaw;
        return r;
    }
};

struct ControllerGains {
    double kx = 6.0;
    double kv = 4.0;
    double kR = 3.0;
    double kOmega = 0.3;

    void validate() const;
    bool operator==(const ControllerGains&) const = default;
};

struct AttitudeReference {
    Rotation rotation;
    Vec3 omega = Vec3::Zero();
    Vec3 omega_dot = Vec3::Zero();
};

struct TrackingErrors {
    Vec3 position;
    Vec3 velocity;
    Vec3 attitude;
    Vec3 omega;
};

inline constexpr double kMinDesiredForce = 1e-6;

/// e_x = x - x_d, e_v = v - v_d, e_R = 1/2 (R_d^T R - R^T R_d)^vee,
/// e_Omega = Omega - R^T R_d Omega_d.
TrackingErrors tracking_errors(const RigidState& state, const FlatReference& ref,
                               const AttitudeReference& att);

/// -k_x e_x - k_v e_v + m g e3 + m a_d, in the world frame.
Vec3 desired_force(const RigidState& state, const FlatReference& ref, const ControllerGains& gains,
                   const VehicleParams& params);

/// Rotation whose third column is along `force` and whose first column is the
/// yaw heading projected orthogonally. Throws DegenerateThrust.
Rotation attitude_from_force(const Vec3& force, double yaw);

/// Estimates Omega_d and its derivative by backward differences of successive
/// desired attitudes. The first sample after construction or reset() yields
/// zero rates, the second yields zero angular acceleration.
class AttitudeDifferentiator {
public:
    explicit AttitudeDifferentiator(double period) : period_(period) {}

    AttitudeReference update(const Rotation& desired);
    void reset();
    double period() const { return period_; }

private:
    double period_;
    std::optional<Rotation> prev_rotation_;
    std::optional<Vec3> prev_omega_;
};

AttitudeReference attitude_from_flat(const RigidState& state, const FlatReference& ref,
                                     const ControllerGains& gains, const VehicleParams& params,
                                     AttitudeDifferentiator& history);

/// Thrust and moment:
///   f = (-k_x e_x - k_v e_v + m g e3 + m a_d) . R e3, clamped to [0, cap m g]
///   M = -k_R e_R - k_Omega e_Omega + Omega x J Omega
///       - J (hat(Omega) R^T R_d Omega_d - R^T R_d dOmega_d)
WrenchCommand control(const RigidState& state, const FlatReference& ref,
                      const AttitudeReference& att, const ControllerGains& gains,
                      const VehicleParams& params);

/// Shrinks the yaw moment so that thrust, roll and pitch stay achievable by
/// the per-rotor clamp. Roll and pitch keep priority over heading.
WrenchCommand limit_yaw_moment(const WrenchCommand& cmd, const VehicleParams& params);

/// Bundles gains, vehicle parameters and the differentiator history for one
/// simulation instance.
class GeometricController {
public:
    GeometricController(ControllerGains gains, VehicleParams params, double period);

    WrenchCommand update(const RigidState& state, const FlatReference& ref);
    void reset() { history_.reset(); }

    const AttitudeReference& last_attitude() const { return last_attitude_; }
    const ControllerGains& gains() const { return gains_; }

private:
    ControllerGains gains_;
    VehicleParams params_;
    AttitudeDifferentiator history_;
    AttitudeReference last_attitude_;
};

}  // namespace qcr
