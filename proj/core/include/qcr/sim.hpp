// Multi-rate deterministic simulation loop and the recovery mode machine.
//
// Every physics step the contact wrench is evaluated inside the integrator.
// Sensor ticks sample the arm loads, characterize them and feed the detector.
// Control ticks recompute the wrench, which is zero-order held until the next
// control tick.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcr/controller.hpp"
#include "qcr/dynamics.hpp"
#include "qcr/planner.hpp"
#include "qcr/scenario.hpp"
#include "qcr/sensing.hpp"

namespace qcr {

enum class FlightMode {
    Hover,
    Tracking,
    MotorsOff,
    WaitingArmRecovery,
    Recovering,
    Landed,
    Failed,
};

std::string_view to_string(FlightMode mode);
bool is_terminal(FlightMode mode);

struct LogRow {
    double t = 0.0;
    RigidState state;
    WrenchCommand wrench;  // achieved wrench applied over the following step
    FlatReference reference;
    ArmReading reading;
    Characterization estimate;
    bool detected = false;
    FlightMode mode = FlightMode::Hover;
    double contact_depth = 0.0;
};

struct ModeTransition {
    double t = 0.0;
    FlightMode from = FlightMode::Hover;
    FlightMode to = FlightMode::Hover;
};

struct SimLog {
    std::string scenario;
    std::uint64_t seed = 0;
    RateConfig rates;
    bool motors = true;

    std::vector<LogRow> rows;
    std::vector<ModeTransition> transitions;
    std::vector<DetectionEvent> detections;
    std::vector<PolySegment> segments;
    std::optional<double> first_contact_time;
    std::optional<double> impulse_end_time;
    std::string termination;  // "duration", "ground", ...

    bool failed() const;
    bool entered(FlightMode mode) const;
};

/// Runs the scenario to its time limit, ground contact or failure.
/// Identical (scenario, seed) pairs yield identical logs.
SimLog run(const Scenario& scenario, std::uint64_t seed);
inline SimLog run(const Scenario& scenario) { return run(scenario, scenario.seed); }

inline constexpr double kSettleThreshold = 0.05;  // m
inline constexpr double kSettleHold = 1.0;        // s

struct Metrics {
    bool collided = false;
    std::optional<double> collision_speed;  // m/s
    double max_intensity = 0.0;
    std::optional<double> orientation;      // Psi_B at detection
    std::optional<double> detection_time;   // t_d
    std::optional<double> latency;          // t_d - first contact
    std::optional<double> settling_time;    // from t_d (or 0 without detection)
    bool success = false;
};

/// Summary quantities of one run. Throws IncompleteLog on an empty log.
Metrics metrics(const SimLog& log, double settle_threshold = kSettleThreshold,
                double settle_hold = kSettleHold);

/// Column header of the per-step CSV log.
std::string_view csv_header();

/// One row per physics step. Numbers are written in shortest round-trip form
/// so equal logs serialize to identical bytes.
void write_csv(const SimLog& log, std::ostream& out);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

}  // namespace qcr
