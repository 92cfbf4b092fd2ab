#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcr/batch.hpp"
#include "qcr/config.hpp"
#include "qcr/errors.hpp"

using namespace qcr;
namespace fs = std::filesystem;

namespace {

Scenario bundled(const std::string& name) { return load_scenario(fs::path(QCR_SCENARIO_DIR) / (name + ".scn")); }

class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("qcr_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string summary(const BatchReport& r) {
    std::ostringstream s;
    write_summary(r, s);
    return s.str();
}

}  // namespace

TEST(Batch, OneRowPerScenarioAndRepetition) {
    const std::vector<Scenario> five{bundled("hover"), bundled("wall_single"), bundled("wall_double"),
                                     bundled("passive_hit"), bundled("free_fall")};
    BatchOptions opt;
    opt.jobs = 4;
    const BatchReport r = run_batch(five, opt);
    ASSERT_EQ(r.runs.size(), 5u);
    for (std::size_t i = 0; i < five.size(); ++i) {
        EXPECT_EQ(r.runs[i].scenario, five[i].name);
        EXPECT_EQ(r.runs[i].seed, five[i].seed);
    }
    EXPECT_TRUE(r.all_completed());
    const std::string text = summary(r);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "scenario,seed,collision_speed,C_B,Psi_B,t_d_latency,settling_time,success");
}

TEST(Batch, RepeatableAndIndependentOfJobs) {
    const std::vector<Scenario> sc{bundled("wall_double"), bundled("unstructured")};
    BatchOptions opt;
    opt.repetitions = 3;
    const std::string serial = summary(run_batch(sc, opt));
    opt.jobs = 3;
    EXPECT_EQ(summary(run_batch(sc, opt)), serial);
    EXPECT_EQ(summary(run_batch(sc, opt)), serial);
}

TEST(Batch, ExplicitSeeds) {
    BatchOptions opt;
    opt.repetitions = 2;
    opt.seeds = {40, 7};
    const BatchReport r = run_batch({bundled("wall_single")}, opt);
    ASSERT_EQ(r.runs.size(), 2u);
    EXPECT_EQ(r.runs[0].seed, 40u);
    EXPECT_EQ(r.runs[1].seed, 7u);
    EXPECT_EQ(r.runs[1].repetition, 1);
    opt.seeds = {1};
    EXPECT_THROW(run_batch({bundled("wall_single")}, opt), ConfigError);
    EXPECT_THROW(run_batch({}, BatchOptions{}), ConfigError);
}

TEST(Batch, SuccessRateMatchesRecount) {
    BatchOptions opt;
    opt.repetitions = 4;
    const BatchReport r = run_batch({bundled("wall_single"), bundled("free_fall")}, opt);
    int recount = 0;
    std::istringstream in(summary(r));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        recount += line.ends_with(",true");
    }
    EXPECT_EQ(rows, 8);
    EXPECT_EQ(recount, r.successes());
    EXPECT_DOUBLE_EQ(r.success_rate(), static_cast<double>(recount) / rows);
    EXPECT_EQ(r.successes(), 4);  // free falls never count
    EXPECT_EQ(BatchReport{}.success_rate(), 0.0);
}

TEST(Batch, FailingRunDoesNotAbort) {
    Scenario broken = bundled("hover");
    broken.name = "broken";
    broken.initial.position = Vec3(0, 0, std::numeric_limits<double>::quiet_NaN());
    const BatchReport r = run_batch({broken, bundled("hover")}, BatchOptions{});
    ASSERT_EQ(r.runs.size(), 2u);
    EXPECT_FALSE(r.runs[0].metrics);
    EXPECT_FALSE(r.runs[0].error.empty());
    EXPECT_TRUE(r.runs[1].metrics);
    EXPECT_FALSE(r.all_completed());
}

TEST(Batch, WritesLogsAndSummary) {
    TempDir dir;
    BatchOptions opt;
    opt.out_dir = dir.path();
    opt.plot = true;
    const BatchReport r = run_batch({bundled("passive_hit")}, opt);
    const fs::path stem = dir.path() / run_stem("passive_hit", 1);
    EXPECT_EQ(r.runs[0].log_path, fs::path(stem.string() + ".csv"));
    EXPECT_EQ(first_line(r.runs[0].log_path), csv_header());
    EXPECT_EQ(slurp(dir.path() / "summary.csv"), summary(r));
    for (const char* suffix : {"_states.csv", "_detection.csv", "_trajectory3d.csv", "_markers.csv"})
        EXPECT_TRUE(fs::exists(stem.string() + suffix)) << suffix;
}

TEST(PlotData, PassiveStatesHaveDesiredColumnsAndMarker) {
    TempDir dir;
    const SimLog log = run(bundled("passive_hit"));
    const auto files = emit_plot_data(log, PlotKind::States, dir.path(), "p");
    ASSERT_EQ(files.size(), 2u);
    const std::string header = first_line(files[0]);
    for (const char* col : {"x_d", "y_d", "z_d", "vx_d", ",x,", ",z,"})
        EXPECT_NE(header.find(col), std::string::npos) << col;
    ASSERT_FALSE(log.detections.empty());
    const std::string markers = slurp(files[1]);
    EXPECT_NE(markers.find("detection," + format_number(log.detections[0].time)), std::string::npos) << markers;
    EXPECT_NE(markers.find("recovery_start,"), std::string::npos);
}

TEST(PlotData, FreeFallHasNoDesiredTrajectory) {
    TempDir dir;
    const SimLog log = run(bundled("free_fall"));
    EXPECT_EQ(first_line(emit_plot_data(log, PlotKind::States, dir.path(), "f")[0]), "t,z,speed");
    EXPECT_EQ(first_line(emit_plot_data(log, PlotKind::Trajectory3d, dir.path(), "f")[0]), "t,x,y,z");
}

TEST(PlotData, EmptyLogRejected) {
    TempDir dir;
    EXPECT_THROW(emit_plot_data(SimLog{}, PlotKind::States, dir.path(), "e"), IncompleteLog);
}
