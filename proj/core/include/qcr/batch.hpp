// Batch execution of scenarios, summary tables and plot-ready data files.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcr/scenario.hpp"
#include "qcr/sim.hpp"

namespace qcr {

struct RunResult {
    std::string scenario;
    std::uint64_t seed = 0;
    int repetition = 0;
    std::optional<Metrics> metrics;  // empty when the run raised an error
    std::string error;
    std::filesystem::path log_path;
};

struct BatchReport {
    std::vector<RunResult> runs;

    int successes() const;
    /// successes / runs; 0 for an empty report.
    double success_rate() const;
    bool all_completed() const;
};

struct BatchOptions {
    int repetitions = 1;
    /// Explicit seeds per repetition; when empty repetition r uses scenario.seed + r.
    std::vector<std::uint64_t> seeds;
    std::optional<std::filesystem::path> out_dir;  // per-run CSV logs and summary.csv
    int jobs = 1;
    bool plot = false;
};

/// Runs every (scenario, seed) pair. A failing run is reported in its row and
/// does not abort the batch. Rows are ordered by scenario, then repetition,
/// regardless of `jobs`.
BatchReport run_batch(const std::vector<Scenario>& scenarios, const BatchOptions& options);

/// Columns: scenario, seed, collision_speed, C_B, Psi_B, t_d_latency,
/// settling_time, success. Missing values are left empty.
void write_summary(const BatchReport& report, std::ostream& out);

enum class PlotKind { States, Detection, Trajectory3d };

/// Writes `<stem>_<kind>.csv` plus `<stem>_markers.csv` (event times such as
/// detection and recovery start) into `dir`. Returns the written paths.
/// Throws IncompleteLog on an empty log.
std::vector<std::filesystem::path> emit_plot_data(const SimLog& log, PlotKind kind,
                                                  const std::filesystem::path& dir,
                                                  const std::string& stem);

std::string run_stem(const std::string& scenario, std::uint64_t seed);

}  // namespace qcr
