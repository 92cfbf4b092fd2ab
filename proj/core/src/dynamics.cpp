#include "qcr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

const Vec3 kE3 = Vec3::UnitZ();

RigidState advance(const RigidState& s, const StateDerivative& d, double h) {
    RigidState out;
    out.position = s.position + h * d.position;
    out.velocity = s.velocity + h * d.velocity;
    out.attitude = Rotation::project(s.attitude.matrix() + h * d.attitude);
    out.omega = s.omega + h * d.omega;
    return out;
}

void check_step(double dt) {
    if (!(dt > 0.0 && dt <= kMaxStep)) {
        throw Error("step: dt must lie in (0, " + std::to_string(kMaxStep) + "]");
    }
}

RigidState finish(const RigidState& s, const StateDerivative& k1, const StateDerivative& k2,
                  const StateDerivative& k3, const StateDerivative& k4, double dt) {
    const double w = dt / 6.0;
    const Mat3 r = s.attitude.matrix() +
                   w * (k1.attitude + 2.0 * k2.attitude + 2.0 * k3.attitude + k4.attitude);
    if (!all_finite(r)) throw NonFiniteState("step: attitude became non-finite");

    RigidState out;
    out.position = s.position + w * (k1.position + 2.0 * k2.position + 2.0 * k3.position + k4.position);
    out.velocity = s.velocity + w * (k1.velocity + 2.0 * k2.velocity + 2.0 * k3.velocity + k4.velocity);
    out.attitude = Rotation::project(r);
    out.omega = s.omega + w * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega);
    if (!out.finite()) throw NonFiniteState("step: state became non-finite");
    return out;
}

}  // namespace

Vec3 VehicleParams::arm_direction(int i) const {
    const double a = arm_azimuths.at(static_cast<std::size_t>(i));
    return {std::cos(a), std::sin(a), 0.0};
}

void VehicleParams::validate() const {
    if (!(mass > 0.0)) throw ConfigError("vehicle.mass must be > 0");
    if (!(gravity > 0.0)) throw ConfigError("vehicle.gravity must be > 0");
    if (!(arm_length > 0.0)) throw ConfigError("vehicle.arm_length must be > 0");
    if (!(torque_coeff > 0.0)) throw ConfigError("vehicle.torque_coeff must be > 0");
    if (!(rotor_thrust_max > 0.0)) throw ConfigError("vehicle.rotor_thrust_max must be > 0");
    if (!(thrust_to_weight_cap > 0.0)) throw ConfigError("vehicle.thrust_to_weight_cap must be > 0");
    if (!all_finite(inertia) || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ConfigError("vehicle.inertia must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw ConfigError("vehicle.inertia must be positive definite");
    }
}

bool RigidState::finite() const {
    return all_finite(position) && all_finite(velocity) && all_finite(attitude.matrix()) &&
           all_finite(omega);
}

WrenchCommand allocate(const RotorThrusts& t, const VehicleParams& p) {
    const auto& f = t.f;
    WrenchCommand w;
    w.thrust = f[0] + f[1] + f[2] + f[3];
    w.moment = {p.arm_length * (f[1] - f[3]),
                p.arm_length * (f[2] - f[0]),
                p.torque_coeff * (f[0] - f[1] + f[2] - f[3])};
    return w;
}

AllocationResult inverse_allocate(const WrenchCommand& cmd, const VehicleParams& p) {
    if (p.arm_length == 0.0 || p.torque_coeff == 0.0) {
        throw SingularMixer("inverse_allocate: arm length and torque coefficient must be nonzero");
    }
    const double base = cmd.thrust / 4.0;
    const double roll = cmd.moment.x() / (2.0 * p.arm_length);
    const double pitch = cmd.moment.y() / (2.0 * p.arm_length);
    const double yaw = cmd.moment.z() / (4.0 * p.torque_coeff);

    AllocationResult out;
    out.thrusts.f = {base - pitch + yaw, base + roll - yaw, base + pitch + yaw, base - roll - yaw};
    for (double& f : out.thrusts.f) {
        const double clamped = std::clamp(f, 0.0, p.rotor_thrust_max);
        if (clamped != f) out.saturated = true;
        f = clamped;
    }
    return out;
}

WrenchCommand achievable_wrench(const WrenchCommand& cmd, const VehicleParams& params) {
    return allocate(inverse_allocate(cmd, params).thrusts, params);
}

StateDerivative derivative(const RigidState& s, const WrenchCommand& cmd, const ExternalWrench& ext,
                           const VehicleParams& p) {
    const Mat3& r = s.attitude.matrix();
    StateDerivative d;
    d.position = s.velocity;
    d.velocity = -p.gravity * kE3 + (cmd.thrust * (r * kE3) + ext.force) / p.mass;
    d.attitude = r * hat(s.omega);
    const Vec3 jw = p.inertia * s.omega;
    d.omega = p.inertia.llt().solve(cmd.moment + ext.torque - s.omega.cross(jw));
    return d;
}

RigidState step(const RigidState& s, const WrenchCommand& cmd, const ExternalWrench& ext,
                const VehicleParams& p, double dt) {
    check_step(dt);
    const StateDerivative k1 = derivative(s, cmd, ext, p);
    const StateDerivative k2 = derivative(advance(s, k1, dt / 2), cmd, ext, p);
    const StateDerivative k3 = derivative(advance(s, k2, dt / 2), cmd, ext, p);
    const StateDerivative k4 = derivative(advance(s, k3, dt), cmd, ext, p);
    return finish(s, k1, k2, k3, k4, dt);
}

RigidState step(const RigidState& s, const WrenchCommand& cmd, const ExternalWrenchFn& ext,
                const VehicleParams& p, double dt) {
    check_step(dt);
    const StateDerivative k1 = derivative(s, cmd, ext(s), p);
    const RigidState s2 = advance(s, k1, dt / 2);
    const StateDerivative k2 = derivative(s2, cmd, ext(s2), p);
    const RigidState s3 = advance(s, k2, dt / 2);
    const StateDerivative k3 = derivative(s3, cmd, ext(s3), p);
    const RigidState s4 = advance(s, k3, dt);
    const StateDerivative k4 = derivative(s4, cmd, ext(s4), p);
    return finish(s, k1, k2, k3, k4, dt);
}

RigidState euler_step(const RigidState& s, const WrenchCommand& cmd, const ExternalWrench& ext,
                      const VehicleParams& p, double dt) {
    check_step(dt);
    const StateDerivative d = derivative(s, cmd, ext, p);
    RigidState out;
    out.position = s.position + dt * d.position;
    out.velocity = s.velocity + dt * d.velocity;
    out.attitude = Rotation::project(s.attitude.matrix() + dt * d.attitude);
    out.omega = s.omega + dt * d.omega;
    if (!out.finite()) throw NonFiniteState("euler_step: state became non-finite");
    return out;
}

double mechanical_energy(const RigidState& s, const VehicleParams& p) {
    return 0.5 * p.mass * s.velocity.squaredNorm() + 0.5 * s.omega.dot(p.inertia * s.omega) +
           p.mass * p.gravity * s.position.z();
}

}  // namespace qcr
