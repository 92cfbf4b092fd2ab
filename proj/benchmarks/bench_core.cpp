#include <benchmark/benchmark.h>

#include <filesystem>

#include "qcr/config.hpp"
#include "qcr/controller.hpp"
#include "qcr/dynamics.hpp"
#include "qcr/planner.hpp"
#include "qcr/sensing.hpp"
#include "qcr/sim.hpp"

using namespace qcr;

namespace {

Scenario bundled(const std::string& name) {
    return load_scenario(std::filesystem::path(QCR_SCENARIO_DIR) / (name + ".scn"));
}

void BM_InverseAllocate(benchmark::State& state) {
    const VehicleParams p;
    WrenchCommand cmd{p.weight(), Vec3(0.05, -0.02, 0.01)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(inverse_allocate(cmd, p));
        cmd.moment.x() += 1e-9;
    }
}
BENCHMARK(BM_InverseAllocate);

void BM_RigidStep(benchmark::State& state) {
    const VehicleParams p;
    RigidState s;
    const WrenchCommand cmd{p.weight(), Vec3(1e-3, 0, 0)};
    for (auto _ : state) {
        s = step(s, cmd, ExternalWrench{}, p, 1e-3);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_RigidStep);

void BM_ControllerUpdate(benchmark::State& state) {
    const VehicleParams p;
    GeometricController ctl(ControllerGains{}, p, 0.02);
    RigidState s;
    s.position = Vec3(0.1, -0.1, 0.9);
    const FlatReference ref = FlatReference::hold(Vec3(0, 0, 1), 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(ctl.update(s, ref));
}
BENCHMARK(BM_ControllerUpdate);

void BM_MinSnap(benchmark::State& state) {
    const EndpointConstraints c{Vec3(0, 0, 1), Vec3(2, 0.1, 0), Vec3(-0.9, 0.2, 1)};
    for (auto _ : state) benchmark::DoNotOptimize(solve_min_snap(c, 1.5));
}
BENCHMARK(BM_MinSnap);

void BM_Characterize(benchmark::State& state) {
    const auto az = VehicleParams{}.arm_azimuths;
    ArmReading r;
    r.d = {0.3, 0.7, 0.0, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(characterize(r, az));
        r.d[0] += 1e-12;
    }
}
BENCHMARK(BM_Characterize);

void BM_ScenarioRun(benchmark::State& state, const char* name) {
    const Scenario sc = bundled(name);
    for (auto _ : state) benchmark::DoNotOptimize(run(sc));
    state.counters["sim_s_per_s"] =
        benchmark::Counter(sc.duration, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK_CAPTURE(BM_ScenarioRun, wall_single, "wall_single")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ScenarioRun, unstructured, "unstructured")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
