#include "qcr/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcr/errors.hpp"
#include "qcr/math.hpp"

namespace qcr {

void ArmModel::validate() const {
    if (!(stiffness > 0.0)) throw ConfigError("arm.stiffness must be > 0");
    if (!(damping >= 0.0)) throw ConfigError("arm.damping must be >= 0");
    if (!(max_compression > 0.0)) throw ConfigError("arm.max_compression must be > 0");
}

double compress(const ArmModel& arm, double axial_force, double /*axial_velocity*/) {
    return std::clamp(axial_force / arm.stiffness, 0.0, arm.max_compression);
}

double reaction_force(const ArmModel& arm, double compression, double compression_rate) {
    return arm.stiffness * compression + arm.damping * compression_rate;
}

double hall_reading(double compression, const ArmModel& arm, const HallResponse& response) {
    const double x = std::clamp(compression / arm.max_compression, 0.0, 1.0);
    return std::clamp(response ? response(x) : x, 0.0, 1.0);
}

Characterization characterize(const ArmReading& reading, const std::array<double, 4>& azimuths) {
    Characterization c;
    const auto active = std::count_if(reading.d.begin(), reading.d.end(), [](double d) { return d != 0.0; });
    if (active == 1) {
        // A lone reading points along its arm; skip atan2 so the azimuth comes back unrounded.
        const auto i = static_cast<std::size_t>(
            std::find_if(reading.d.begin(), reading.d.end(), [](double d) { return d != 0.0; }) - reading.d.begin());
        c.intensity = std::abs(reading.d[i]);
        c.orientation = wrap_angle(reading.d[i] > 0.0 ? azimuths[i] : azimuths[i] + std::numbers::pi);
        return c;
    }

    double dx = 0.0;
    double dy = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        dx += reading.d[i] * std::cos(azimuths[i]);
        dy += reading.d[i] * std::sin(azimuths[i]);
    }
    c.intensity = std::hypot(dx, dy);
    if (c.intensity == 0.0) return c;
    c.orientation = std::atan2(dy, dx);
    if (c.orientation == -std::numbers::pi) c.orientation = std::numbers::pi;
    return c;
}

void DetectorConfig::validate() const {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("detector.threshold must be in (0, 1)");
    if (confirm_ticks < 1) throw ConfigError("detector.confirm_ticks must be >= 1");
    if (!(tick_rate > 0.0)) throw ConfigError("detector.tick_rate must be > 0");
}

CollisionDetector::CollisionDetector(DetectorConfig config) : config_(config) { config_.validate(); }

std::optional<DetectionEvent> CollisionDetector::update(const Characterization& estimate, double t) {
    if (latched_) return std::nullopt;

    if (!armed_) {
        if (!(estimate.intensity > config_.threshold)) return std::nullopt;
        armed_ = true;
        max_intensity_ = estimate.intensity;
        max_orientation_ = estimate.orientation;
        max_time_ = t;
        ticks_since_max_ = 0;
        return std::nullopt;
    }

    if (estimate.intensity > max_intensity_) {
        max_intensity_ = estimate.intensity;
        max_orientation_ = estimate.orientation;
        max_time_ = t;
        ticks_since_max_ = 0;
        return std::nullopt;
    }

    if (++ticks_since_max_ < config_.confirm_ticks) return std::nullopt;

    latched_ = true;
    return DetectionEvent{max_intensity_, max_orientation_, t, max_time_};
}

void CollisionDetector::reset() {
    armed_ = false;
    latched_ = false;
    ticks_since_max_ = 0;
    max_intensity_ = 0.0;
    max_orientation_ = 0.0;
    max_time_ = 0.0;
}

}  // namespace qcr
