// Timing comparison of the serial reference paths against the OpenMP ones
// for the two hot kernels: the Goursat solve and the time stepper.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tbeam/analysis.hpp"

using namespace tbeam;

namespace {

double now() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double time_solve(int n, ExecPolicy policy) {
    const SpatialGrid grid(n);
    SolverOptions opt;
    opt.policy = policy;
    const double t0 = now();
    const KernelSolution sol = solve_kernels(BeamParams{}, ControllerParams{}, grid, opt);
    const double t1 = now();
    std::printf("  n=%4d %-8s solve: %7.3f s (%d sweeps)\n", n,
                policy == ExecPolicy::parallel ? "parallel" : "serial", t1 - t0, sol.iterations);
    return t1 - t0;
}

double time_simulate(int n, double t_final, ExecPolicy policy, const GainSet& gains) {
    const SpatialGrid grid(n);
    const PhysicalState init = default_initial_state(grid);
    SimConfig cfg;
    cfg.t_final = t_final;
    cfg.policy = policy;
    const double t0 = now();
    const TimeSeries series = simulate(init, BeamParams{}, ControllerParams{}, cfg, &gains);
    const double t1 = now();
    std::printf("  n=%4d %-8s simulate to t=%g: %7.3f s (%zu steps, final ratio %.2e)\n", n,
                policy == ExecPolicy::parallel ? "parallel" : "serial", t_final, t1 - t0,
                series.times.size() - 1, series.energy.back() / series.energy.front());
    return t1 - t0;
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 240;
    const double t_final = argc > 2 ? std::atof(argv[2]) : 8.0;

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serial code\n");
#endif

    std::printf("kernel solve\n");
    const double s_serial = time_solve(n, ExecPolicy::serial);
    const double s_par = time_solve(n, ExecPolicy::parallel);
    std::printf("  speedup: %.2fx\n", s_serial / s_par);

    const SpatialGrid grid(n);
    const KernelSolution sol = solve_kernels(BeamParams{}, ControllerParams{}, grid);
    const GainSet gains = extract_gains(sol, grid);

    std::printf("closed-loop simulation\n");
    const double t_serial = time_simulate(n, t_final, ExecPolicy::serial, gains);
    const double t_par = time_simulate(n, t_final, ExecPolicy::parallel, gains);
    std::printf("  speedup: %.2fx\n", t_serial / t_par);
    return 0;
}
