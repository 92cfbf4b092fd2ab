#include "qcr/batch.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <thread>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

void optional_cell(std::ostream& out, const std::optional<double>& v) {
    out << ',';
    if (v) out << format_number(*v);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void write_markers(const SimLog& log, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "event,t\n";
    if (log.first_contact_time) out << "first_contact," << format_number(*log.first_contact_time) << '\n';
    for (const DetectionEvent& ev : log.detections) out << "detection," << format_number(ev.time) << '\n';
    for (const PolySegment& seg : log.segments) {
        out << "recovery_start," << format_number(seg.start_time()) << '\n';
        out << "recovery_end," << format_number(seg.end_time()) << '\n';
    }
}

RunResult execute(const Scenario& sc, std::uint64_t seed, int repetition, const BatchOptions& opt) {
    RunResult r;
    r.scenario = sc.name;
    r.seed = seed;
    r.repetition = repetition;
    try {
        const SimLog log = run(sc, seed);
        r.metrics = metrics(log);
        if (opt.out_dir) {
            const std::string stem = run_stem(sc.name, seed);
            r.log_path = *opt.out_dir / (stem + ".csv");
            std::ofstream out = open_out(r.log_path);
            write_csv(log, out);
            if (opt.plot) {
                for (PlotKind k : {PlotKind::States, PlotKind::Detection, PlotKind::Trajectory3d}) {
                    emit_plot_data(log, k, *opt.out_dir, stem);
                }
            }
        }
    } catch (const std::exception& e) {
        r.metrics.reset();
        r.error = e.what();
    }
    return r;
}

}  // namespace

int BatchReport::successes() const {
    return static_cast<int>(std::count_if(runs.begin(), runs.end(), [](const RunResult& r) {
        return r.metrics && r.metrics->success;
    }));
}

double BatchReport::success_rate() const {
    return runs.empty() ? 0.0 : static_cast<double>(successes()) / static_cast<double>(runs.size());
}

bool BatchReport::all_completed() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.error.empty(); });
}

std::string run_stem(const std::string& scenario, std::uint64_t seed) {
    return scenario + "_seed" + std::to_string(seed);
}

BatchReport run_batch(const std::vector<Scenario>& scenarios, const BatchOptions& opt) {
    if (scenarios.empty()) throw ConfigError("run_batch: no scenarios given");
    if (opt.repetitions < 1) throw ConfigError("run_batch: repetitions must be >= 1");
    if (!opt.seeds.empty() && static_cast<int>(opt.seeds.size()) != opt.repetitions) {
        throw ConfigError("run_batch: need exactly one seed per repetition");
    }
    if (opt.out_dir) std::filesystem::create_directories(*opt.out_dir);

    struct Job {
        const Scenario* scenario;
        std::uint64_t seed;
        int repetition;
    };
    std::vector<Job> jobs;
    for (const Scenario& sc : scenarios) {
        for (int r = 0; r < opt.repetitions; ++r) {
            const std::uint64_t seed = opt.seeds.empty() ? sc.seed + static_cast<std::uint64_t>(r)
                                                         : opt.seeds[static_cast<std::size_t>(r)];
            jobs.push_back({&sc, seed, r});
        }
    }

    BatchReport report;
    report.runs.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            report.runs[i] = execute(*jobs[i].scenario, jobs[i].seed, jobs[i].repetition, opt);
        }
    };
    const int n = std::clamp(opt.jobs, 1, static_cast<int>(jobs.size()));
    std::vector<std::jthread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();

    if (opt.out_dir) {
        std::ofstream out = open_out(*opt.out_dir / "summary.csv");
        write_summary(report, out);
    }
    return report;
}

void write_summary(const BatchReport& report, std::ostream& out) {
    out << "scenario,seed,collision_speed,C_B,Psi_B,t_d_latency,settling_time,success\n";
    for (const RunResult& r : report.runs) {
        out << r.scenario << ',' << r.seed;
        if (r.metrics) {
            const Metrics& m = *r.metrics;
            optional_cell(out, m.collision_speed);
            optional_cell(out, m.collided || m.max_intensity > 0.0 ? std::optional(m.max_intensity) : std::nullopt);
            optional_cell(out, m.orientation);
            optional_cell(out, m.latency);
            optional_cell(out, m.settling_time);
            out << ',' << (m.success ? "true" : "false") << '\n';
        } else {
            out << ",,,,,false\n";
        }
    }
}

std::vector<std::filesystem::path> emit_plot_data(const SimLog& log, PlotKind kind,
                                                  const std::filesystem::path& dir,
                                                  const std::string& stem) {
    if (log.rows.empty()) throw IncompleteLog("emit_plot_data: log has no rows");
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const auto n = [](double v) { return format_number(v); };

    switch (kind) {
        case PlotKind::States: {
            const auto path = dir / (stem + "_states.csv");
            std::ofstream out = open_out(path);
            if (log.motors) {
                out << "t,x,y,z,x_d,y_d,z_d,vx,vy,vz,vx_d,vy_d,vz_d,mode\n";
                for (const LogRow& r : log.rows) {
                    out << n(r.t);
                    for (int i = 0; i < 3; ++i) out << ',' << n(r.state.position[i]);
                    for (int i = 0; i < 3; ++i) out << ',' << n(r.reference.position[i]);
                    for (int i = 0; i < 3; ++i) out << ',' << n(r.state.velocity[i]);
                    for (int i = 0; i < 3; ++i) out << ',' << n(r.reference.velocity[i]);
                    out << ',' << to_string(r.mode) << '\n';
                }
            } else {
                out << "t,z,speed\n";
                for (const LogRow& r : log.rows) {
                    out << n(r.t) << ',' << n(r.state.position.z()) << ',' << n(r.state.velocity.norm()) << '\n';
                }
            }
            written.push_back(path);
            break;
        }
        case PlotKind::Detection: {
            const auto path = dir / (stem + "_detection.csv");
            std::ofstream out = open_out(path);
            out << "t,d1,d2,d3,d4,C_B,Psi_B,detected\n";
            for (const LogRow& r : log.rows) {
                out << n(r.t);
                for (double d : r.reading.d) out << ',' << n(d);
                out << ',' << n(r.estimate.intensity) << ',' << n(r.estimate.orientation) << ','
                    << (r.detected ? 1 : 0) << '\n';
            }
            written.push_back(path);
            break;
        }
        case PlotKind::Trajectory3d: {
            const auto path = dir / (stem + "_trajectory3d.csv");
            std::ofstream out = open_out(path);
            out << (log.motors ? "t,x,y,z,x_d,y_d,z_d\n" : "t,x,y,z\n");
            for (const LogRow& r : log.rows) {
                out << n(r.t);
                for (int i = 0; i < 3; ++i) out << ',' << n(r.state.position[i]);
                if (log.motors) {
                    for (int i = 0; i < 3; ++i) out << ',' << n(r.reference.position[i]);
                }
                out << '\n';
            }
            written.push_back(path);
            break;
        }
    }
    const auto markers = dir / (stem + "_markers.csv");
    write_markers(log, markers);
    written.push_back(markers);
    return written;
}

}  // namespace qcr
