#include "qcr/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

constexpr double kUnitTolerance = 1e-9;

bool is_unit(const Vec3& v) { return std::abs(v.norm() - 1.0) <= kUnitTolerance; }

Penetration against(const Vec3& p, double r, const Wall& w) {
    const double signed_distance = (p - w.point).dot(w.normal);
    return {std::max(0.0, r - signed_distance), w.normal};
}

Penetration against(const Vec3& p, double r, const Pole& pole) {
    const Vec3 rel = p - pole.axis_point;
    const Vec3 radial = rel - rel.dot(pole.axis) * pole.axis;
    const double dist = radial.norm();
    Vec3 n = dist > 0.0 ? Vec3(radial / dist) : pole.axis.unitOrthogonal();
    return {std::max(0.0, r + pole.radius - dist), n};
}

Penetration against(const Vec3& p, double r, const Sphere& s) {
    const Vec3 rel = p - s.center;
    const double dist = rel.norm();
    Vec3 n = dist > 0.0 ? Vec3(rel / dist) : Vec3::UnitZ();
    return {std::max(0.0, r + s.radius - dist), n};
}

Penetration against(const Vec3& p, double r, const Unstructured& u) {
    Penetration best;
    for (const Wall& w : u.planes) {
        const Penetration c = against(p, r, w);
        if (c.depth > best.depth) best = c;
    }
    for (const Sphere& s : u.spheres) {
        const Penetration c = against(p, r, s);
        if (c.depth > best.depth) best = c;
    }
    return best;
}

Penetration against(const Vec3& p, double r, const Ground&) {
    return against(p, r, Wall{Vec3::Zero(), Vec3::UnitZ()});
}

double unit_draw(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

void validate(const Obstacle& obstacle) {
    std::visit(
        [](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Wall>) {
                if (!is_unit(o.normal)) throw ConfigError("wall normal must be unit length");
            } else if constexpr (std::is_same_v<T, Pole>) {
                if (!is_unit(o.axis)) throw ConfigError("pole axis must be unit length");
                if (!(o.radius > 0.0)) throw ConfigError("pole radius must be > 0");
            } else if constexpr (std::is_same_v<T, Unstructured>) {
                for (const Wall& w : o.planes) {
                    if (!is_unit(w.normal)) throw ConfigError("surface normal must be unit length");
                }
                for (const Sphere& s : o.spheres) {
                    if (!(s.radius > 0.0)) throw ConfigError("sphere radius must be > 0");
                }
            }
        },
        obstacle);
}

Penetration penetration(const Vec3& point, double radius, const Obstacle& obstacle) {
    return std::visit([&](const auto& o) { return against(point, radius, o); }, obstacle);
}

std::vector<ContactPoint> cage_tips(const VehicleParams& params, double half_span, double radius) {
    std::vector<ContactPoint> tips;
    for (int i = 0; i < 4; ++i) tips.push_back({i, half_span * params.arm_direction(i), radius});
    return tips;
}

int nearest_arm(const Vec3& offset, const VehicleParams& params) {
    int best = 0;
    double best_cos = -2.0;
    const Vec3 planar(offset.x(), offset.y(), 0.0);
    for (int i = 0; i < 4; ++i) {
        const double c = planar.dot(params.arm_direction(i));
        if (c > best_cos) {
            best_cos = c;
            best = i;
        }
    }
    return best;
}

ContactResult contact_wrench(const RigidState& state, const VehicleParams& params,
                             const std::vector<ContactPoint>& points,
                             const std::vector<Obstacle>& obstacles, const ContactParams& contact) {
    ContactResult out;
    const Mat3& r = state.attitude.matrix();
    std::array<Vec3, 4> arm_load{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

    for (const ContactPoint& cp : points) {
        const Vec3 world_point = state.position + r * cp.offset;
        const Vec3 point_velocity = state.velocity + r * state.omega.cross(cp.offset);
        Vec3 force = Vec3::Zero();
        for (const Obstacle& obstacle : obstacles) {
            const Penetration pen = penetration(world_point, cp.radius, obstacle);
            if (pen.depth <= 0.0) continue;
            out.max_depth = std::max(out.max_depth, pen.depth);
            const double approach = std::max(0.0, -point_velocity.dot(pen.normal));
            force += (contact.stiffness * pen.depth + contact.damping * approach) * pen.normal;
        }
        if (force.isZero(0.0)) continue;
        const Vec3 body_force = r.transpose() * force;
        out.wrench.force += force;
        out.wrench.torque += cp.offset.cross(body_force);
        arm_load[static_cast<std::size_t>(cp.arm)] += body_force;
    }
    for (int i = 0; i < 4; ++i) {
        out.axial[static_cast<std::size_t>(i)] =
            std::max(0.0, -arm_load[static_cast<std::size_t>(i)].dot(params.arm_direction(i)));
    }
    return out;
}

RigidState apply_impulse(const RigidState& state, const ImpulseEvent& event,
                         const VehicleParams& params) {
    RigidState out = state;
    out.velocity += event.impulse / params.mass;
    const Vec3 body_impulse = state.attitude.transpose() * event.impulse;
    out.omega += params.inertia.llt().solve(event.offset.cross(body_impulse));
    return out;
}

ContactResult impulse_pulse(const RigidState& state, const ImpulseEvent& event, double t,
                            const VehicleParams& params) {
    ContactResult out;
    if (!(event.duration > 0.0) || t < event.time || t >= event.time + event.duration) return out;
    const double phase = std::numbers::pi * (t - event.time) / event.duration;
    const Vec3 force = event.impulse * (std::numbers::pi / (2.0 * event.duration)) * std::sin(phase);
    const Vec3 body_force = state.attitude.transpose() * force;
    out.wrench.force = force;
    out.wrench.torque = event.offset.cross(body_force);
    const int arm = nearest_arm(event.offset, params);
    out.axial[static_cast<std::size_t>(arm)] =
        std::max(0.0, -body_force.dot(params.arm_direction(arm)));
    return out;
}

Unstructured make_unstructured(const Wall& base, std::uint64_t seed, int count, double patch_half_width,
                               double min_radius, double max_radius) {
    std::mt19937_64 gen(seed);
    Unstructured u;
    u.planes.push_back(base);
    const Vec3 t1 = base.normal.unitOrthogonal();
    const Vec3 t2 = base.normal.cross(t1);
    for (int i = 0; i < count; ++i) {
        const double a = (2.0 * unit_draw(gen) - 1.0) * patch_half_width;
        const double b = (2.0 * unit_draw(gen) - 1.0) * patch_half_width;
        const double radius = min_radius + (max_radius - min_radius) * unit_draw(gen);
        // Each sphere protrudes between half and one radius out of the plane.
        const double proud = 0.5 * radius * unit_draw(gen);
        u.spheres.push_back({base.point + a * t1 + b * t2 + (proud - 0.5 * radius) * base.normal, radius});
    }
    return u;
}

}  // namespace qcr
