// Compliant-arm sensing: arm compression, normalized Hall readings, collision
// characterization and the max-intensity detection state machine.
#pragma once

#include <array>
#include <functional>
#include <optional>

namespace qcr {

/// Spring-damper model of one compliant arm. Compression is positive when the
/// arm shortens.
struct ArmModel {
    double stiffness = 4000.0;       // N/m
    double damping = 20.0;           // N s/m
    double max_compression = 0.045;  // m, absorber travel
    double azimuth = 0.0;            // rad, body frame

    void validate() const;
    bool operator==(const ArmModel&) const = default;
};

/// Quasi-static compression clamp(F / k, 0, max_compression). The axial
/// velocity only enters the reaction force, not the compression itself.
double compress(const ArmModel& arm, double axial_force, double axial_velocity = 0.0);

/// Force the absorber pushes back with: k delta + c delta_dot.
double reaction_force(const ArmModel& arm, double compression, double compression_rate);

/// Maps compression normalized to [0, 1] onto a sensor value in [0, 1].
using HallResponse = std::function<double(double)>;

/// d = response(compression / max_compression), clamped to [0, 1]. The
/// default response is linear.
double hall_reading(double compression, const ArmModel& arm, const HallResponse& response = {});

struct ArmReading {
    std::array<double, 4> d{};
    double t = 0.0;
};

struct Characterization {
    double intensity = 0.0;    // C_B, dimensionless
    double orientation = 0.0;  // Psi_B, rad in (-pi, pi]
};

/// Sums the readings projected onto the body x/y axes:
///   d_x = sum d_i cos(phi_i), d_y = sum d_i sin(phi_i)
///   C_B = hypot(d_x, d_y), Psi_B = atan2(d_y, d_x)
/// Psi_B is 0 for a zero vector and +pi (never -pi) on the negative x axis.
/// A single nonzero reading returns its arm azimuth wrapped to (-pi, pi].
Characterization characterize(const ArmReading& reading, const std::array<double, 4>& azimuths);

struct DetectorConfig {
    double threshold = 0.1;
    int confirm_ticks = 10;
    double tick_rate = 200.0;  // Hz

    void validate() const;
    bool operator==(const DetectorConfig&) const = default;
};

struct DetectionEvent {
    double intensity = 0.0;    // running max of C_B
    double orientation = 0.0;  // Psi_B at the max
    double time = 0.0;         // t_d, when the flag was raised
    double time_of_max = 0.0;
};

/// Idle until C_B exceeds the threshold, then tracks the running maximum.
/// Every new maximum restarts a tick counter; after `confirm_ticks` ticks
/// without a new maximum the detector fires once and latches until reset().
class CollisionDetector {
public:
    explicit CollisionDetector(DetectorConfig config);

    std::optional<DetectionEvent> update(const Characterization& estimate, double t);
    void reset();

    bool armed() const { return armed_; }
    bool latched() const { return latched_; }
    const DetectorConfig& config() const { return config_; }

private:
    DetectorConfig config_;
    bool armed_ = false;
    bool latched_ = false;
    int ticks_since_max_ = 0;
    double max_intensity_ = 0.0;
    double max_orientation_ = 0.0;
    double max_time_ = 0.0;
};

}  // namespace qcr
