#include "qcr/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <random>

#include "qcr/errors.hpp"
#include "qcr/world.hpp"

namespace qcr {

namespace {

constexpr std::uint64_t kNoiseStream = 0xbb67ae8584caa73bULL;

class Simulation {
public:
    Simulation(const Scenario& scenario, std::uint64_t seed)
        : sc_(apply_jitter(scenario, seed)),
          obstacles_(realize_obstacles(sc_, seed)),
          tips_(cage_tips(sc_.vehicle, sc_.cage_half_span, sc_.tip_radius)),
          controller_(sc_.gains, sc_.vehicle, 1.0 / sc_.rates.control_rate),
          detector_(with_tick_rate(sc_.detector, sc_.rates.sensor_rate)),
          noise_(seed ^ kNoiseStream) {
        sc_.validate();
        for (int i = 0; i < 4; ++i) {
            arms_[static_cast<std::size_t>(i)] = sc_.sensor.arm;
            arms_[static_cast<std::size_t>(i)].azimuth = sc_.vehicle.arm_azimuths[static_cast<std::size_t>(i)];
        }
        state_.position = sc_.initial.position;
        state_.velocity = sc_.initial.velocity;
        state_.attitude = rot_z(sc_.initial.yaw);
        origin_ = sc_.initial.position;
        yaw_ = sc_.initial.yaw;
        hover_setpoint_ = sc_.initial.setpoint.value_or(origin_);

        if (!sc_.initial.motors) {
            mode_ = FlightMode::MotorsOff;
        } else if (sc_.approach) {
            mode_ = FlightMode::Tracking;
        } else {
            mode_ = FlightMode::Hover;
        }

        pending_.assign(sc_.impulses.begin(), sc_.impulses.end());
        std::stable_sort(pending_.begin(), pending_.end(),
                         [](const ImpulseEvent& a, const ImpulseEvent& b) { return a.time < b.time; });

        log_.scenario = sc_.name;
        log_.seed = seed;
        log_.rates = sc_.rates;
        log_.motors = sc_.initial.motors;
    }

    SimLog run() {
        const double dt = sc_.rates.physics_dt;
        const int sensor_every = sc_.rates.sensor_every();
        const int control_every = sc_.rates.control_every();
        const auto steps = static_cast<long>(std::llround(sc_.duration / dt));

        for (long k = 0;; ++k) {
            const double t = static_cast<double>(k) * dt;

            if (k % sensor_every == 0) sense(t);
            if (k % control_every == 0) command(t);

            const double depth = contact_depth();
            if (depth > 0.0 && !log_.first_contact_time) log_.first_contact_time = t;
            record(t, depth);

            if (touching_ground()) {
                transition(t, log_.motors ? FlightMode::Failed : FlightMode::Landed);
                log_.rows.back().mode = mode_;
                log_.termination = "ground";
                break;
            }
            if (k >= steps) {
                log_.termination = "duration";
                break;
            }
            integrate(t, dt);
        }
        return std::move(log_);
    }

private:
    static DetectorConfig with_tick_rate(DetectorConfig cfg, double rate) {
        cfg.tick_rate = rate;
        return cfg;
    }

    void transition(double t, FlightMode to) {
        if (to == mode_) return;
        log_.transitions.push_back({t, mode_, to});
        mode_ = to;
        controller_.reset();
    }

    void sense(double t) {
        ContactResult load = contact_wrench(state_, sc_.vehicle, tips_, obstacles_, sc_.contact);
        for (const ImpulseEvent& ev : active_pulses(t)) {
            const ContactResult pulse = impulse_pulse(state_, ev, t, sc_.vehicle);
            for (std::size_t i = 0; i < 4; ++i) load.axial[i] += pulse.axial[i];
        }

        reading_.t = t;
        for (std::size_t i = 0; i < 4; ++i) {
            double d = hall_reading(compress(arms_[i], load.axial[i]), arms_[i]);
            if (sc_.sensor.noise > 0.0) {
                d = std::clamp(d + sc_.sensor.noise * (static_cast<double>(noise_() >> 11) * 0x1.0p-52 - 1.0),
                               0.0, 1.0);
            }
            reading_.d[i] = d;
        }
        estimate_ = characterize(reading_, sc_.vehicle.arm_azimuths);

        if (const auto event = detector_.update(estimate_, t)) {
            log_.detections.push_back(*event);
            if (sc_.planner.enabled && (mode_ == FlightMode::Hover || mode_ == FlightMode::Tracking)) {
                event_ = *event;
                collision_position_ = state_.position;
                collision_attitude_ = state_.attitude;
                if (mode_ == FlightMode::Tracking) hover_setpoint_ = state_.position;
                wait_deadline_ = t + sc_.planner.max_wait;
                transition(t, FlightMode::WaitingArmRecovery);
            }
        }

        if (mode_ == FlightMode::WaitingArmRecovery) {
            const bool released = std::all_of(reading_.d.begin(), reading_.d.end(), [&](double d) {
                return d < sc_.planner.release_threshold;
            });
            if (released || t >= wait_deadline_) plan(t);
        }
    }

    void plan(double t) {
        const PlannerConfig& p = sc_.planner;
        const Vec3 target = recovery_target(collision_position_, collision_attitude_, event_, p.k_dist);
        const double duration = time_allocation(state_.position, target, p.v_max, p.a_max, p.t_min);
        EndpointConstraints c;
        c.x0 = state_.position;
        c.v0 = state_.velocity;
        c.xd = target;
        log_.segments.push_back(solve_min_snap(c, duration, yaw_, t));
        transition(t, FlightMode::Recovering);
    }

    FlatReference reference(double t) {
        switch (mode_) {
            case FlightMode::Tracking:
                return approach_reference(*sc_.approach, origin_, yaw_, t);
            case FlightMode::Recovering: {
                const PolySegment& seg = log_.segments.back();
                return eval(seg, t - seg.start_time());
            }
            default:
                return FlatReference::hold(hover_setpoint_, yaw_);
        }
    }

    void command(double t) {
        if (mode_ == FlightMode::Recovering && t >= log_.segments.back().end_time()) {
            hover_setpoint_ = log_.segments.back().target();
            detector_.reset();
            transition(t, FlightMode::Hover);
        }
        if (mode_ == FlightMode::MotorsOff || is_terminal(mode_)) {
            wrench_ = WrenchCommand{};
            reference_ = FlatReference::hold(state_.position, yaw_);
            return;
        }
        reference_ = reference(t);
        wrench_ = achievable_wrench(controller_.update(state_, reference_), sc_.vehicle);
    }

    std::vector<ImpulseEvent> active_pulses(double t) const {
        std::vector<ImpulseEvent> out;
        for (const ImpulseEvent& ev : sc_.impulses) {
            if (ev.duration > 0.0 && t >= ev.time && t < ev.time + ev.duration) out.push_back(ev);
        }
        return out;
    }

    double contact_depth() const {
        double depth = 0.0;
        for (const ContactPoint& cp : tips_) {
            const Vec3 p = state_.position + state_.attitude * cp.offset;
            for (const Obstacle& o : obstacles_) depth = std::max(depth, penetration(p, cp.radius, o).depth);
            if (sc_.ground) depth = std::max(depth, penetration(p, cp.radius, Ground{}).depth);
        }
        if (sc_.ground) depth = std::max(depth, penetration(state_.position, sc_.tip_radius, Ground{}).depth);
        return depth;
    }

    bool touching_ground() const {
        if (!sc_.ground) return false;
        if (penetration(state_.position, sc_.tip_radius, Ground{}).depth > 0.0) return true;
        return std::any_of(tips_.begin(), tips_.end(), [&](const ContactPoint& cp) {
            return penetration(state_.position + state_.attitude * cp.offset, cp.radius, Ground{}).depth > 0.0;
        });
    }

    void record(double t, double depth) {
        LogRow row;
        row.t = t;
        row.state = state_;
        row.wrench = wrench_;
        row.reference = reference_;
        row.reading = reading_;
        row.estimate = estimate_;
        row.detected = detector_.latched();
        row.mode = mode_;
        row.contact_depth = depth;
        log_.rows.push_back(row);
    }

    void integrate(double t, double dt) {
        // Instantaneous impulses land at the start of the step they fall in.
        while (next_impulse_ < pending_.size() && pending_[next_impulse_].time < t + dt) {
            const ImpulseEvent& ev = pending_[next_impulse_++];
            if (ev.duration == 0.0) state_ = apply_impulse(state_, ev, sc_.vehicle);
            if (!log_.first_contact_time) log_.first_contact_time = t;
            log_.impulse_end_time = ev.time + ev.duration;
        }

        // Pulses are sampled at the step midpoint and held over the step.
        const std::vector<ImpulseEvent> pulses = active_pulses(t + 0.5 * dt);
        const ExternalWrenchFn external = [&](const RigidState& s) {
            ExternalWrench w = contact_wrench(s, sc_.vehicle, tips_, obstacles_, sc_.contact).wrench;
            for (const ImpulseEvent& ev : pulses) {
                const ExternalWrench p = impulse_pulse(s, ev, t + 0.5 * dt, sc_.vehicle).wrench;
                w.force += p.force;
                w.torque += p.torque;
            }
            return w;
        };
        state_ = step(state_, wrench_, external, sc_.vehicle, dt);
    }

    Scenario sc_;
    std::vector<Obstacle> obstacles_;
    std::vector<ContactPoint> tips_;
    std::array<ArmModel, 4> arms_;
    GeometricController controller_;
    CollisionDetector detector_;
    std::mt19937_64 noise_;

    RigidState state_;
    FlightMode mode_ = FlightMode::Hover;
    Vec3 origin_ = Vec3::Zero();
    double yaw_ = 0.0;
    Vec3 hover_setpoint_ = Vec3::Zero();
    WrenchCommand wrench_;
    FlatReference reference_;
    ArmReading reading_;
    Characterization estimate_;

    DetectionEvent event_;
    Vec3 collision_position_ = Vec3::Zero();
    Rotation collision_attitude_;
    double wait_deadline_ = 0.0;

    std::vector<ImpulseEvent> pending_;
    std::size_t next_impulse_ = 0;

    SimLog log_;
};

void put(std::ostream& out, double v) { out << format_number(v); }

}  // namespace

std::string_view to_string(FlightMode mode) {
    switch (mode) {
        case FlightMode::Hover: return "hover";
        case FlightMode::Tracking: return "tracking";
        case FlightMode::MotorsOff: return "motors_off";
        case FlightMode::WaitingArmRecovery: return "waiting";
        case FlightMode::Recovering: return "recovering";
        case FlightMode::Landed: return "landed";
        case FlightMode::Failed: return "failed";
    }
    return "unknown";
}

bool is_terminal(FlightMode mode) { return mode == FlightMode::Landed || mode == FlightMode::Failed; }

bool SimLog::failed() const { return entered(FlightMode::Failed); }

bool SimLog::entered(FlightMode mode) const {
    if (!rows.empty() && rows.front().mode == mode) return true;
    return std::any_of(transitions.begin(), transitions.end(),
                       [&](const ModeTransition& tr) { return tr.to == mode; });
}

SimLog run(const Scenario& scenario, std::uint64_t seed) { return Simulation(scenario, seed).run(); }

Metrics metrics(const SimLog& log, double settle_threshold, double settle_hold) {
    if (log.rows.empty()) throw IncompleteLog("metrics: log has no rows");
    Metrics m;

    for (const LogRow& row : log.rows) m.max_intensity = std::max(m.max_intensity, row.estimate.intensity);

    if (log.first_contact_time) {
        m.collided = true;
        const double at = log.impulse_end_time ? *log.impulse_end_time : *log.first_contact_time;
        const auto it = std::find_if(log.rows.begin(), log.rows.end(),
                                     [&](const LogRow& r) { return r.t >= at - 1e-12; });
        if (it != log.rows.end()) m.collision_speed = it->state.velocity.norm();
    }

    double settle_from = 0.0;
    if (!log.detections.empty()) {
        const DetectionEvent& ev = log.detections.front();
        m.orientation = ev.orientation;
        m.detection_time = ev.time;
        if (log.first_contact_time) m.latency = ev.time - *log.first_contact_time;
        settle_from = ev.time;
    }

    // First time after settle_from at which the hover error (position minus
    // hover setpoint, Hover mode only) stays below threshold for settle_hold.
    std::optional<double> streak_start;
    for (const LogRow& row : log.rows) {
        if (row.t < settle_from) continue;
        const bool good = row.mode == FlightMode::Hover &&
                          (row.state.position - row.reference.position).norm() < settle_threshold;
        if (!good) {
            streak_start.reset();
            continue;
        }
        if (!streak_start) streak_start = row.t;
        if (row.t - *streak_start >= settle_hold - 1e-9) {
            m.settling_time = *streak_start - settle_from;
            break;
        }
    }

    m.success = log.motors && !log.failed() && m.settling_time.has_value();
    return m;
}

std::string_view csv_header() {
    return "t,x,y,z,vx,vy,vz,r11,r12,r13,r21,r22,r23,r31,r32,r33,wx,wy,wz,f,Mx,My,Mz,"
           "d1,d2,d3,d4,C_B,Psi_B,detected,mode,contact_depth";
}

std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_csv(const SimLog& log, std::ostream& out) {
    out << csv_header() << '\n';
    for (const LogRow& r : log.rows) {
        put(out, r.t);
        for (int i = 0; i < 3; ++i) { out << ','; put(out, r.state.position[i]); }
        for (int i = 0; i < 3; ++i) { out << ','; put(out, r.state.velocity[i]); }
        const Mat3& m = r.state.attitude.matrix();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) { out << ','; put(out, m(i, j)); }
        for (int i = 0; i < 3; ++i) { out << ','; put(out, r.state.omega[i]); }
        out << ','; put(out, r.wrench.thrust);
        for (int i = 0; i < 3; ++i) { out << ','; put(out, r.wrench.moment[i]); }
        for (double d : r.reading.d) { out << ','; put(out, d); }
        out << ','; put(out, r.estimate.intensity);
        out << ','; put(out, r.estimate.orientation);
        out << ',' << (r.detected ? 1 : 0) << ',' << to_string(r.mode) << ',';
        put(out, r.contact_depth);
        out << '\n';
    }
}

}  // namespace qcr
