#include "qcr/config.hpp"

#include <charconv>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qcr/errors.hpp"
#include "qcr/sim.hpp"

namespace qcr {

namespace {

namespace pt = boost::property_tree;

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<double> parse_numbers(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
            throw ValidationError(key, "expected a number, got '" + item + "'");
        }
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

// Typed access to one section; remembers which keys were consumed so the
// leftovers can be reported as unknown.
class Section {
public:
    Section(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    bool has(const std::string& key) const { return tree_.find(key) != tree_.not_found(); }

    std::string text(const std::string& key) {
        used_.insert(key);
        return tree_.get<std::string>(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const auto v = parse_numbers(path(key), text(key));
        if (v.size() != 1) throw ValidationError(path(key), "expected one number");
        return v[0];
    }

    long integer(const std::string& key, long fallback) {
        const double v = number(key, static_cast<double>(fallback));
        if (v != std::floor(v)) throw ValidationError(path(key), "expected an integer");
        return static_cast<long>(v);
    }

    Vec3 vec3(const std::string& key, const Vec3& fallback) {
        if (!has(key)) return fallback;
        const auto v = parse_numbers(path(key), text(key));
        if (v.size() != 3) throw ValidationError(path(key), "expected three comma-separated numbers");
        return {v[0], v[1], v[2]};
    }

    std::vector<double> list(const std::string& key) { return parse_numbers(path(key), text(key)); }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string v = text(key);
        if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "off" || v == "no" || v == "0") return false;
        throw ValidationError(path(key), "expected true/false");
    }

    /// Angle given either in radians under `key` or in degrees under `key_deg`.
    double angle(const std::string& key, double fallback) {
        if (has(key) && has(key + "_deg")) throw ValidationError(path(key), "given both in radians and degrees");
        if (has(key + "_deg")) return number(key + "_deg", 0.0) * kDeg;
        return number(key, fallback);
    }

    void finish() const {
        for (const auto& [key, child] : tree_) {
            if (!child.empty()) throw ValidationError(path(key), "nested sections are not supported");
            if (!used_.count(key)) throw ValidationError(path(key), "unknown key");
        }
    }

    std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

private:
    const pt::ptree& tree_;
    std::string name_;
    std::set<std::string> used_;
};

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

void read_vehicle(Section& s, VehicleParams& v) {
    v.mass = s.number("mass", v.mass);
    v.gravity = s.number("gravity", v.gravity);
    if (s.has("inertia")) {
        const auto j = s.list("inertia");
        if (j.size() == 3) {
            v.inertia = Eigen::Vector3d(j[0], j[1], j[2]).asDiagonal();
        } else if (j.size() == 9) {
            v.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(j.data());
        } else {
            throw ValidationError(s.path("inertia"), "expected 3 (diagonal) or 9 (row-major) numbers");
        }
    }
    v.arm_length = s.number("arm_length", v.arm_length);
    v.torque_coeff = s.number("torque_coeff", v.torque_coeff);
    v.rotor_thrust_max = s.number("rotor_thrust_max", v.rotor_thrust_max);
    v.thrust_to_weight_cap = s.number("thrust_to_weight_cap", v.thrust_to_weight_cap);
    if (s.has("arm_azimuths") && s.has("arm_azimuths_deg")) {
        throw ValidationError(s.path("arm_azimuths"), "given both in radians and degrees");
    }
    for (const char* key : {"arm_azimuths", "arm_azimuths_deg"}) {
        if (!s.has(key)) continue;
        const auto a = s.list(key);
        if (a.size() != 4) throw ValidationError(s.path(key), "expected four angles");
        const double scale = std::string(key) == "arm_azimuths" ? 1.0 : kDeg;
        for (std::size_t i = 0; i < 4; ++i) v.arm_azimuths[i] = a[i] * scale;
    }
}

ObstacleSpec read_obstacle(Section& s) {
    if (!s.has("type")) throw ValidationError(s.path("type"), "missing obstacle type");
    const std::string type = s.text("type");
    if (type == "wall") {
        return Wall{s.vec3("point", Vec3::Zero()), s.vec3("normal", Vec3::UnitX())};
    }
    if (type == "pole") {
        Pole p;
        p.axis_point = s.vec3("point", p.axis_point);
        p.axis = s.vec3("axis", p.axis);
        p.radius = s.number("radius", p.radius);
        return p;
    }
    if (type == "unstructured") {
        UnstructuredSpec u;
        u.base.point = s.vec3("point", u.base.point);
        u.base.normal = s.vec3("normal", u.base.normal);
        u.count = static_cast<int>(s.integer("count", u.count));
        u.patch_half_width = s.number("patch_half_width", u.patch_half_width);
        u.min_radius = s.number("min_radius", u.min_radius);
        u.max_radius = s.number("max_radius", u.max_radius);
        return u;
    }
    throw ValidationError(s.path("type"), "unknown obstacle type '" + type + "'");
}

ImpulseEvent read_impulse(Section& s) {
    ImpulseEvent ev;
    ev.time = s.number("time", ev.time);
    ev.impulse = s.vec3("impulse", ev.impulse);
    ev.offset = s.vec3("offset", ev.offset);
    ev.duration = s.number("duration", ev.duration);
    return ev;
}

Scenario from_tree(const pt::ptree& tree) {
    Scenario sc;
    std::vector<std::pair<std::string, const pt::ptree*>> sections;

    for (const auto& [key, child] : tree) {
        if (child.empty()) continue;  // root key, handled below
        sections.emplace_back(key, &child);
    }

    // Root-level keys.
    pt::ptree root;
    for (const auto& [key, child] : tree) {
        if (child.empty()) root.push_back({key, child});
    }
    Section r(root, "");
    if (r.has("name")) sc.name = r.text("name");
    if (r.has("description")) sc.description = r.text("description");
    sc.duration = r.number("duration", sc.duration);
    const long seed = r.integer("seed", static_cast<long>(sc.seed));
    if (seed < 0) throw ValidationError("seed", "must be >= 0");
    sc.seed = static_cast<std::uint64_t>(seed);
    r.finish();

    for (const auto& [name, child] : sections) {
        Section s(*child, name);
        if (name == "vehicle") {
            read_vehicle(s, sc.vehicle);
        } else if (name == "cage") {
            sc.cage_half_span = s.number("half_span", sc.cage_half_span);
            sc.tip_radius = s.number("tip_radius", sc.tip_radius);
        } else if (name == "contact") {
            sc.contact.stiffness = s.number("stiffness", sc.contact.stiffness);
            sc.contact.damping = s.number("damping", sc.contact.damping);
        } else if (name == "world") {
            sc.ground = s.boolean("ground", sc.ground);
        } else if (name == "initial") {
            sc.initial.position = s.vec3("position", sc.initial.position);
            sc.initial.velocity = s.vec3("velocity", sc.initial.velocity);
            sc.initial.yaw = s.angle("yaw", sc.initial.yaw);
            sc.initial.motors = s.boolean("motors", sc.initial.motors);
            if (s.has("setpoint")) sc.initial.setpoint = s.vec3("setpoint", Vec3::Zero());
        } else if (name == "approach") {
            ApproachProfile a;
            a.direction = s.vec3("direction", a.direction);
            a.speed = s.number("speed", a.speed);
            a.acceleration = s.number("acceleration", a.acceleration);
            a.start_time = s.number("start_time", a.start_time);
            a.speed_jitter = s.number("speed_jitter", a.speed_jitter);
            a.lateral_jitter = s.number("lateral_jitter", a.lateral_jitter);
            sc.approach = a;
        } else if (name == "rates") {
            sc.rates.physics_dt = s.number("physics_dt", sc.rates.physics_dt);
            sc.rates.sensor_rate = s.number("sensor_rate", sc.rates.sensor_rate);
            sc.rates.control_rate = s.number("control_rate", sc.rates.control_rate);
        } else if (name == "arm") {
            sc.sensor.arm.stiffness = s.number("stiffness", sc.sensor.arm.stiffness);
            sc.sensor.arm.damping = s.number("damping", sc.sensor.arm.damping);
            sc.sensor.arm.max_compression = s.number("max_compression", sc.sensor.arm.max_compression);
        } else if (name == "detector") {
            sc.detector.threshold = s.number("threshold", sc.detector.threshold);
            sc.detector.confirm_ticks = static_cast<int>(s.integer("confirm_ticks", sc.detector.confirm_ticks));
            sc.sensor.noise = s.number("noise", sc.sensor.noise);
        } else if (name == "controller") {
            sc.gains.kx = s.number("kx", sc.gains.kx);
            sc.gains.kv = s.number("kv", sc.gains.kv);
            sc.gains.kR = s.number("kR", sc.gains.kR);
            sc.gains.kOmega = s.number("kOmega", sc.gains.kOmega);
        } else if (name == "planner") {
            PlannerConfig& p = sc.planner;
            p.enabled = s.boolean("enabled", p.enabled);
            p.k_dist = s.number("k_dist", p.k_dist);
            p.v_max = s.number("v_max", p.v_max);
            p.a_max = s.number("a_max", p.a_max);
            p.t_min = s.number("t_min", p.t_min);
            p.release_threshold = s.number("release_threshold", p.release_threshold);
            p.max_wait = s.number("max_wait", p.max_wait);
        } else if (starts_with(name, "obstacle")) {
            sc.obstacles.push_back(read_obstacle(s));
        } else if (starts_with(name, "impulse")) {
            sc.impulses.push_back(read_impulse(s));
        } else {
            throw ValidationError(name, "unknown section");
        }
        s.finish();
    }

    sc.detector.tick_rate = sc.rates.sensor_rate;
    sc.validate();
    return sc;
}

std::string num(double v) { return format_number(v); }

std::string vec(const Vec3& v) { return num(v.x()) + ", " + num(v.y()) + ", " + num(v.z()); }

}  // namespace

Scenario parse_scenario(std::string_view text) {
    pt::ptree tree;
    std::istringstream in{std::string(text)};
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(e.message(), e.line());
    }
    return from_tree(tree);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize(const Scenario& sc) {
    std::ostringstream o;
    o << "name = " << sc.name << '\n';
    if (!sc.description.empty()) o << "description = " << sc.description << '\n';
    o << "duration = " << num(sc.duration) << '\n';
    o << "seed = " << sc.seed << '\n';

    const VehicleParams& v = sc.vehicle;
    o << "\n[vehicle]\n";
    o << "mass = " << num(v.mass) << '\n';
    o << "gravity = " << num(v.gravity) << '\n';
    o << "inertia = ";
    for (int i = 0; i < 9; ++i) o << (i ? ", " : "") << num(v.inertia(i / 3, i % 3));
    o << '\n';
    o << "arm_length = " << num(v.arm_length) << '\n';
    o << "torque_coeff = " << num(v.torque_coeff) << '\n';
    o << "rotor_thrust_max = " << num(v.rotor_thrust_max) << '\n';
    o << "thrust_to_weight_cap = " << num(v.thrust_to_weight_cap) << '\n';
    o << "arm_azimuths = ";
    for (std::size_t i = 0; i < 4; ++i) o << (i ? ", " : "") << num(v.arm_azimuths[i]);
    o << '\n';

    o << "\n[cage]\nhalf_span = " << num(sc.cage_half_span) << "\ntip_radius = " << num(sc.tip_radius) << '\n';
    o << "\n[contact]\nstiffness = " << num(sc.contact.stiffness) << "\ndamping = " << num(sc.contact.damping)
      << '\n';
    o << "\n[world]\nground = " << (sc.ground ? "true" : "false") << '\n';

    o << "\n[initial]\nposition = " << vec(sc.initial.position) << "\nvelocity = " << vec(sc.initial.velocity)
      << "\nyaw = " << num(sc.initial.yaw) << "\nmotors = " << (sc.initial.motors ? "on" : "off") << '\n';
    if (sc.initial.setpoint) o << "setpoint = " << vec(*sc.initial.setpoint) << '\n';

    if (sc.approach) {
        const ApproachProfile& a = *sc.approach;
        o << "\n[approach]\ndirection = " << vec(a.direction) << "\nspeed = " << num(a.speed)
          << "\nacceleration = " << num(a.acceleration) << "\nstart_time = " << num(a.start_time)
          << "\nspeed_jitter = " << num(a.speed_jitter) << "\nlateral_jitter = " << num(a.lateral_jitter) << '\n';
    }

    o << "\n[rates]\nphysics_dt = " << num(sc.rates.physics_dt) << "\nsensor_rate = " << num(sc.rates.sensor_rate)
      << "\ncontrol_rate = " << num(sc.rates.control_rate) << '\n';
    o << "\n[arm]\nstiffness = " << num(sc.sensor.arm.stiffness) << "\ndamping = " << num(sc.sensor.arm.damping)
      << "\nmax_compression = " << num(sc.sensor.arm.max_compression) << '\n';
    o << "\n[detector]\nthreshold = " << num(sc.detector.threshold) << "\nconfirm_ticks = "
      << sc.detector.confirm_ticks << "\nnoise = " << num(sc.sensor.noise) << '\n';
    o << "\n[controller]\nkx = " << num(sc.gains.kx) << "\nkv = " << num(sc.gains.kv) << "\nkR = "
      << num(sc.gains.kR) << "\nkOmega = " << num(sc.gains.kOmega) << '\n';

    const PlannerConfig& p = sc.planner;
    o << "\n[planner]\nenabled = " << (p.enabled ? "true" : "false") << "\nk_dist = " << num(p.k_dist)
      << "\nv_max = " << num(p.v_max) << "\na_max = " << num(p.a_max) << "\nt_min = " << num(p.t_min)
      << "\nrelease_threshold = " << num(p.release_threshold) << "\nmax_wait = " << num(p.max_wait) << '\n';

    int index = 1;
    for (const ObstacleSpec& spec : sc.obstacles) {
        o << "\n[obstacle" << index++ << "]\n";
        std::visit(
            [&](const auto& ob) {
                using T = std::decay_t<decltype(ob)>;
                if constexpr (std::is_same_v<T, Wall>) {
                    o << "type = wall\npoint = " << vec(ob.point) << "\nnormal = " << vec(ob.normal) << '\n';
                } else if constexpr (std::is_same_v<T, Pole>) {
                    o << "type = pole\npoint = " << vec(ob.axis_point) << "\naxis = " << vec(ob.axis)
                      << "\nradius = " << num(ob.radius) << '\n';
                } else {
                    o << "type = unstructured\npoint = " << vec(ob.base.point) << "\nnormal = " << vec(ob.base.normal)
                      << "\ncount = " << ob.count << "\npatch_half_width = " << num(ob.patch_half_width)
                      << "\nmin_radius = " << num(ob.min_radius) << "\nmax_radius = " << num(ob.max_radius) << '\n';
                }
            },
            spec);
    }
    index = 1;
    for (const ImpulseEvent& ev : sc.impulses) {
        o << "\n[impulse" << index++ << "]\ntime = " << num(ev.time) << "\nimpulse = " << vec(ev.impulse)
          << "\noffset = " << vec(ev.offset) << "\nduration = " << num(ev.duration) << '\n';
    }
    return o.str();
}

}  // namespace qcr
