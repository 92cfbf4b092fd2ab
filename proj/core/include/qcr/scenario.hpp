// Declarative description of one simulated experiment.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcr/controller.hpp"
#include "qcr/dynamics.hpp"
#include "qcr/sensing.hpp"
#include "qcr/world.hpp"

namespace qcr {

struct RateConfig {
    double physics_dt = 1e-3;    // s
    double sensor_rate = 200.0;  // Hz
    double control_rate = 50.0;  // Hz

    /// Physics steps per sensor / control tick. Throws ConfigError when the
    /// periods are not integer multiples of physics_dt.
    int sensor_every() const;
    int control_every() const;
    void validate() const;

    bool operator==(const RateConfig&) const = default;
};

/// Surface realized per run from the run seed.
struct UnstructuredSpec {
    Wall base;
    int count = 20;  // 10..30
    double patch_half_width = 0.6;
    double min_radius = 0.04;
    double max_radius = 0.12;

    bool operator==(const UnstructuredSpec&) const = default;
};

using ObstacleSpec = std::variant<Wall, Pole, UnstructuredSpec>;

/// Constant-acceleration ramp from rest up to `speed`, then constant velocity
/// along `direction`. The obstacle position is not known to the reference.
struct ApproachProfile {
    Vec3 direction = Vec3::UnitX();
    double speed = 1.0;         // m/s
    double acceleration = 2.0;  // m/s^2
    double start_time = 1.0;    // s
    double speed_jitter = 0.0;  // fraction; per-run speed is speed * (1 - jitter * u)
    double lateral_jitter = 0.0;  // m, horizontal offset perpendicular to direction

    bool operator==(const ApproachProfile&) const = default;
};

struct InitialConditions {
    Vec3 position = Vec3(0.0, 0.0, 1.0);
    Vec3 velocity = Vec3::Zero();
    double yaw = 0.0;
    bool motors = true;
    /// Hover setpoint; defaults to the initial position.
    std::optional<Vec3> setpoint;

    bool operator==(const InitialConditions&) const = default;
};

struct PlannerConfig {
    bool enabled = true;
    double k_dist = 1.0;    // m per unit intensity
    double v_max = 2.0;     // m/s
    double a_max = 9.81;    // m/s^2, g (cap - 1)
    double t_min = 0.5;     // s
    double release_threshold = 0.05;  // all d_i below this ends the arm wait
    double max_wait = 1.0;  // s

    bool operator==(const PlannerConfig&) const = default;
};

struct SensorConfig {
    ArmModel arm;  // azimuth is taken from the vehicle
    double noise = 0.0;  // uniform noise half-width on each d_i

    bool operator==(const SensorConfig&) const = default;
};

struct Scenario {
    std::string name;
    std::string description;
    double duration = 10.0;
    std::uint64_t seed = 1;

    VehicleParams vehicle;
    double cage_half_span = kCageHalfSpan;
    double tip_radius = 0.02;
    ContactParams contact;
    bool ground = true;
    std::vector<ObstacleSpec> obstacles;

    InitialConditions initial;
    std::optional<ApproachProfile> approach;
    std::vector<ImpulseEvent> impulses;

    RateConfig rates;
    SensorConfig sensor;
    DetectorConfig detector;
    ControllerGains gains;
    PlannerConfig planner;

    /// Throws ValidationError naming the offending key.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

/// Obstacles for one run; unstructured surfaces are drawn from `seed`.
std::vector<Obstacle> realize_obstacles(const Scenario& scenario, std::uint64_t seed);

/// Scenario with the per-run approach jitter drawn from `seed` applied.
Scenario apply_jitter(const Scenario& scenario, std::uint64_t seed);

/// Reference along the approach ramp starting at `origin`.
FlatReference approach_reference(const ApproachProfile& approach, const Vec3& origin, double yaw,
                                 double t);

}  // namespace qcr
