#include "qcr/scenario.hpp"

#include <cmath>
#include <random>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

int ticks_per_period(double rate, double dt, const char* key) {
    if (!(rate > 0.0)) throw ValidationError(key, "rate must be > 0");
    const double ratio = 1.0 / (rate * dt);
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
        throw ValidationError(key, "period must be an integer multiple of rates.physics_dt");
    }
    return static_cast<int>(rounded);
}

template <typename Fn>
void rethrow_as(const char* key, Fn&& fn) {
    try {
        fn();
    } catch (const ValidationError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ValidationError(key, e.what());
    }
}

double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Keeps jitter draws independent from the other seeded streams.
constexpr std::uint64_t kJitterStream = 0x6a09e667f3bcc909ULL;

}  // namespace

int RateConfig::sensor_every() const { return ticks_per_period(sensor_rate, physics_dt, "rates.sensor_rate"); }
int RateConfig::control_every() const { return ticks_per_period(control_rate, physics_dt, "rates.control_rate"); }

void RateConfig::validate() const {
    if (!(physics_dt > 0.0 && physics_dt <= kMaxStep)) {
        throw ValidationError("rates.physics_dt", "must lie in (0, 0.01]");
    }
    (void)sensor_every();
    (void)control_every();
}

void Scenario::validate() const {
    if (name.empty()) throw ValidationError("name", "missing scenario name");
    if (!(duration > 0.0)) throw ValidationError("duration", "must be > 0");
    rethrow_as("vehicle", [&] { vehicle.validate(); });
    if (!(cage_half_span > 0.0)) throw ValidationError("cage.half_span", "must be > 0");
    if (!(tip_radius > 0.0)) throw ValidationError("cage.tip_radius", "must be > 0");
    if (!(contact.stiffness > 0.0)) throw ValidationError("contact.stiffness", "must be > 0");
    if (!(contact.damping >= 0.0)) throw ValidationError("contact.damping", "must be >= 0");
    for (const ObstacleSpec& spec : obstacles) {
        rethrow_as("obstacle", [&] {
            std::visit(
                [](const auto& o) {
                    using T = std::decay_t<decltype(o)>;
                    if constexpr (std::is_same_v<T, UnstructuredSpec>) {
                        qcr::validate(Obstacle{o.base});
                        if (o.count < 10 || o.count > 30) throw ConfigError("count must be in [10, 30]");
                        if (!(o.min_radius > 0.0 && o.max_radius >= o.min_radius)) {
                            throw ConfigError("radii must satisfy 0 < min_radius <= max_radius");
                        }
                        if (!(o.patch_half_width > 0.0)) throw ConfigError("patch_half_width must be > 0");
                    } else {
                        qcr::validate(Obstacle{o});
                    }
                },
                spec);
        });
    }
    if (!initial.position.allFinite() || !initial.velocity.allFinite() || !std::isfinite(initial.yaw)) {
        throw ValidationError("initial", "non-finite initial state");
    }
    if (initial.setpoint && !initial.setpoint->allFinite()) {
        throw ValidationError("initial.setpoint", "must be finite");
    }
    if (approach) {
        if (std::abs(approach->direction.norm() - 1.0) > 1e-9) {
            throw ValidationError("approach.direction", "must be unit length");
        }
        if (!(approach->speed > 0.0)) throw ValidationError("approach.speed", "must be > 0");
        if (!(approach->acceleration > 0.0)) throw ValidationError("approach.acceleration", "must be > 0");
        if (!(approach->speed_jitter >= 0.0 && approach->speed_jitter < 1.0)) {
            throw ValidationError("approach.speed_jitter", "must be in [0, 1)");
        }
        if (!(approach->lateral_jitter >= 0.0)) throw ValidationError("approach.lateral_jitter", "must be >= 0");
        if (!initial.motors) throw ValidationError("approach", "requires motors on");
    }
    for (const ImpulseEvent& ev : impulses) {
        if (!(ev.time >= 0.0) || !ev.impulse.allFinite() || !ev.offset.allFinite() || !(ev.duration >= 0.0)) {
            throw ValidationError("impulse", "time, impulse, offset and duration must be finite and non-negative");
        }
    }
    rates.validate();
    rethrow_as("arm", [&] { sensor.arm.validate(); });
    if (!(sensor.noise >= 0.0 && sensor.noise < 1.0)) throw ValidationError("detector.noise", "must be in [0, 1)");
    rethrow_as("detector", [&] { detector.validate(); });
    rethrow_as("controller", [&] { gains.validate(); });
    if (!(planner.k_dist > 0.0)) throw ValidationError("planner.k_dist", "must be > 0");
    if (!(planner.v_max > 0.0)) throw ValidationError("planner.v_max", "must be > 0");
    if (!(planner.a_max > 0.0)) throw ValidationError("planner.a_max", "must be > 0");
    if (!(planner.t_min > 0.0)) throw ValidationError("planner.t_min", "must be > 0");
    if (!(planner.release_threshold > 0.0 && planner.release_threshold < 1.0)) {
        throw ValidationError("planner.release_threshold", "must be in (0, 1)");
    }
    if (!(planner.max_wait > 0.0 && planner.max_wait <= 1.0)) {
        throw ValidationError("planner.max_wait", "must be in (0, 1]");
    }
}

std::vector<Obstacle> realize_obstacles(const Scenario& scenario, std::uint64_t seed) {
    std::vector<Obstacle> out;
    std::uint64_t stream = seed;
    for (const ObstacleSpec& spec : scenario.obstacles) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, UnstructuredSpec>) {
                    out.emplace_back(make_unstructured(o.base, stream++, o.count, o.patch_half_width,
                                                       o.min_radius, o.max_radius));
                } else {
                    out.emplace_back(o);
                }
            },
            spec);
    }
    return out;
}

Scenario apply_jitter(const Scenario& scenario, std::uint64_t seed) {
    Scenario out = scenario;
    if (!out.approach) return out;
    ApproachProfile& a = *out.approach;
    if (a.speed_jitter == 0.0 && a.lateral_jitter == 0.0) return out;

    std::mt19937_64 gen(seed ^ kJitterStream);
    const double u_speed = unit_draw(gen);
    const double u_lateral = unit_draw(gen);
    a.speed *= 1.0 - a.speed_jitter * u_speed;
    Vec3 side = Vec3::UnitZ().cross(a.direction);
    if (side.norm() > 1e-12) {
        side.normalize();
        out.initial.position += side * a.lateral_jitter * (2.0 * u_lateral - 1.0);
    }
    return out;
}

FlatReference approach_reference(const ApproachProfile& a, const Vec3& origin, double yaw, double t) {
    FlatReference ref = FlatReference::hold(origin, yaw);
    const double tau = t - a.start_time;
    if (tau <= 0.0) return ref;
    const double ramp = a.speed / a.acceleration;
    if (tau < ramp) {
        ref.position = origin + a.direction * (0.5 * a.acceleration * tau * tau);
        ref.velocity = a.direction * (a.acceleration * tau);
        ref.acceleration = a.direction * a.acceleration;
    } else {
        ref.position = origin + a.direction * (0.5 * a.acceleration * ramp * ramp + a.speed * (tau - ramp));
        ref.velocity = a.direction * a.speed;
    }
    return ref;
}

}  // namespace qcr
