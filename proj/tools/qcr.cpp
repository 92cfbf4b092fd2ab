// qcr: run, validate and list collision-recovery scenarios.
#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcr/batch.hpp"
#include "qcr/config.hpp"
#include "qcr/errors.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scenario_dir() {
    if (const char* env = std::getenv("QCR_SCENARIO_DIR"); env && *env) return env;
    return QCR_SCENARIO_DIR;
}

// A scenario argument is either a file path or the name of a bundled scenario.
fs::path resolve(const std::string& arg) {
    const fs::path direct(arg);
    if (fs::is_regular_file(direct)) return direct;
    const fs::path bundled = scenario_dir() / (arg + ".scn");
    if (fs::is_regular_file(bundled)) return bundled;
    throw qcr::ConfigError("no scenario file or bundled scenario named '" + arg + "'");
}

std::vector<fs::path> bundled() {
    std::vector<fs::path> out;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(scenario_dir(), ec))
        if (e.is_regular_file() && e.path().extension() == ".scn") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_run(const std::vector<std::string>& names, const qcr::BatchOptions& opt) {
    std::vector<qcr::Scenario> scenarios;
    for (const auto& n : names) scenarios.push_back(qcr::load_scenario(resolve(n)));

    const qcr::BatchReport report = qcr::run_batch(scenarios, opt);
    qcr::write_summary(report, std::cout);
    for (const auto& r : report.runs)
        if (!r.error.empty()) std::cerr << r.scenario << " seed " << r.seed << ": " << r.error << "\n";
    std::cerr << "success " << report.successes() << "/" << report.runs.size() << "\n";
    return report.all_completed() ? 0 : 1;
}

int cmd_validate(const std::vector<std::string>& names) {
    int status = 0;
    for (const auto& n : names) {
        try {
            const qcr::Scenario sc = qcr::load_scenario(resolve(n));
            std::cout << "ok " << sc.name << "\n";
        } catch (const qcr::ParseError& e) {
            std::cerr << n << ": line " << e.line() << ": " << e.what() << "\n";
            status = 1;
        } catch (const qcr::ValidationError& e) {
            std::cerr << n << ": " << e.key() << ": " << e.what() << "\n";
            status = 1;
        } catch (const qcr::Error& e) {
            std::cerr << n << ": " << e.what() << "\n";
            status = 1;
        }
    }
    return status;
}

int cmd_list() {
    for (const auto& p : bundled()) {
        try {
            const qcr::Scenario sc = qcr::load_scenario(p);
            std::cout << sc.name << "\t" << sc.description << "\n";
        } catch (const qcr::Error& e) {
            std::cout << p.stem().string() << "\t(invalid: " << e.what() << ")\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulate collision detection and recovery of a compliant-arm quadrotor"};
    app.require_subcommand(1);

    std::vector<std::string> names;
    std::uint64_t seed = 0;
    std::string out;
    qcr::BatchOptions opt;

    auto* run = app.add_subcommand("run", "run scenarios and print the summary table");
    run->add_option("scenario", names, "scenario file or bundled name")->required();
    auto* seed_opt = run->add_option("--seed", seed, "first seed (default: the scenario's seed)");
    run->add_option("--out", out, "directory for per-run CSV logs and summary.csv");
    run->add_option("--reps", opt.repetitions, "repetitions per scenario")->check(CLI::PositiveNumber);
    run->add_option("--jobs,-j", opt.jobs, "parallel runs")->check(CLI::PositiveNumber);
    run->add_flag("--plot", opt.plot, "also write plot data files")->needs("--out");

    std::vector<std::string> to_check;
    auto* validate = app.add_subcommand("validate", "check scenario files");
    validate->add_option("scenario", to_check, "scenario file or bundled name")->required();

    auto* list = app.add_subcommand("list", "list bundled scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors share the error status
    }

    try {
        if (*run) {
            if (*seed_opt)
                for (int r = 0; r < opt.repetitions; ++r) opt.seeds.push_back(seed + static_cast<std::uint64_t>(r));
            if (!out.empty()) opt.out_dir = fs::path(out);
            return cmd_run(names, opt);
        }
        if (*validate) return cmd_validate(to_check);
        if (*list) return cmd_list();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
