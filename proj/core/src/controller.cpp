#include "qcr/controller.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "qcr/errors.hpp"

namespace qcr {

namespace {
const Vec3 kE3 = Vec3::UnitZ();
}

void ControllerGains::validate() const {
    if (!(kx > 0.0 && kv > 0.0 && kR > 0.0 && kOmega > 0.0)) {
        throw ConfigError("controller gains must all be > 0");
    }
}

TrackingErrors tracking_errors(const RigidState& state, const FlatReference& ref,
                               const AttitudeReference& att) {
    const Mat3& r = state.attitude.matrix();
    const Mat3& rd = att.rotation.matrix();
    TrackingErrors e;
    e.position = state.position - ref.position;
    e.velocity = state.velocity - ref.velocity;
    // The difference is skew by construction; the loose tolerance only guards
    // against rounding in nearly-orthogonal inputs.
    e.attitude = 0.5 * vee(rd.transpose() * r - r.transpose() * rd, 1e-6);
    e.omega = state.omega - r.transpose() * rd * att.omega;
    return e;
}

Vec3 desired_force(const RigidState& state, const FlatReference& ref, const ControllerGains& g,
                   const VehicleParams& p) {
    const Vec3 ex = state.position - ref.position;
    const Vec3 ev = state.velocity - ref.velocity;
    return -g.kx * ex - g.kv * ev + p.mass * p.gravity * kE3 + p.mass * ref.acceleration;
}

Rotation attitude_from_force(const Vec3& force, double yaw) {
    const double norm = force.norm();
    if (!(norm >= kMinDesiredForce)) {
        throw DegenerateThrust("desired force vector is (nearly) zero");
    }
    const Vec3 b3 = force / norm;
    const Vec3 heading(std::cos(yaw), std::sin(yaw), 0.0);
    Vec3 b2 = b3.cross(heading);
    if (b2.norm() < 1e-9) {
        throw DegenerateThrust("desired thrust direction is parallel to the yaw heading");
    }
    b2.normalize();
    const Vec3 b1 = b2.cross(b3);
    Mat3 m;
    m.col(0) = b1;
    m.col(1) = b2;
    m.col(2) = b3;
    return Rotation::project(m);
}

AttitudeReference AttitudeDifferentiator::update(const Rotation& desired) {
    AttitudeReference out;
    out.rotation = desired;
    if (prev_rotation_) {
        const Eigen::AngleAxisd delta(prev_rotation_->matrix().transpose() * desired.matrix());
        out.omega = delta.angle() * delta.axis() / period_;
        if (prev_omega_) out.omega_dot = (out.omega - *prev_omega_) / period_;
        prev_omega_ = out.omega;
    }
    prev_rotation_ = desired;
    return out;
}

void AttitudeDifferentiator::reset() {
    prev_rotation_.reset();
    prev_omega_.reset();
}

AttitudeReference attitude_from_flat(const RigidState& state, const FlatReference& ref,
                                     const ControllerGains& gains, const VehicleParams& params,
                                     AttitudeDifferentiator& history) {
    return history.update(attitude_from_force(desired_force(state, ref, gains, params), ref.yaw));
}

WrenchCommand control(const RigidState& state, const FlatReference& ref,
                      const AttitudeReference& att, const ControllerGains& g,
                      const VehicleParams& p) {
    const TrackingErrors e = tracking_errors(state, ref, att);
    const Mat3& r = state.attitude.matrix();
    const Mat3 rel = r.transpose() * att.rotation.matrix();
    const Vec3& w = state.omega;

    WrenchCommand cmd;
    const double f = desired_force(state, ref, g, p).dot(r * kE3);
    cmd.thrust = std::clamp(f, 0.0, p.max_collective_thrust());
    cmd.moment = -g.kR * e.attitude - g.kOmega * e.omega + w.cross(p.inertia * w) -
                 p.inertia * (hat(w) * rel * att.omega - rel * att.omega_dot);
    return cmd;
}

GeometricController::GeometricController(ControllerGains gains, VehicleParams params, double period)
    : gains_(gains), params_(std::move(params)), history_(period) {
    gains_.validate();
}

WrenchCommand limit_yaw_moment(const WrenchCommand& cmd, const VehicleParams& params) {
    const double l = params.arm_length;
    const double c = params.torque_coeff;
    const double fmax = params.rotor_thrust_max;
    const double base = cmd.thrust / 4.0;
    const std::array<double, 4> g = {base - cmd.moment.y() / (2 * l), base + cmd.moment.x() / (2 * l),
                                     base + cmd.moment.y() / (2 * l), base - cmd.moment.x() / (2 * l)};
    const std::array<double, 4> sign = {1.0, -1.0, 1.0, -1.0};

    // Rotor i receives sign_i * M3 / (4c) on top of g_i.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const double down = std::max(0.0, g[i]) * 4 * c;
        const double up = std::max(0.0, fmax - g[i]) * 4 * c;
        if (sign[i] > 0) {
            lo = std::max(lo, -down);
            hi = std::min(hi, up);
        } else {
            lo = std::max(lo, -up);
            hi = std::min(hi, down);
        }
    }
    WrenchCommand out = cmd;
    out.moment.z() = std::clamp(cmd.moment.z(), std::min(lo, 0.0), std::max(hi, 0.0));
    return out;
}

WrenchCommand GeometricController::update(const RigidState& state, const FlatReference& ref) {
    last_attitude_ = attitude_from_flat(state, ref, gains_, params_, history_);
    return limit_yaw_moment(control(state, ref, last_attitude_, gains_, params_), params_);
}

}  // namespace qcr
