#pragma once

#include <string>
#include <vector>

#include "tbeam/analysis.hpp"
#include "tbeam/simulator.hpp"

namespace tbeam {

struct RunConfig {
    BeamParams beam;
    ControllerParams ctrl;
    int n = 200;
    double cfl = 0.8;
    double t_final = 20.0;
    SimMode mode = SimMode::closed_loop;
    std::string out_dir = ".";
    bool zero_initial = false;  // simulate from the zero state instead of the
                                // reference polynomials
};

// key = value file, '#' starts a comment. Recognized keys: epsilon, mu, a,
// theta, xi, delta1, delta2, n, dt_cfl, t_final. Unknown keys are an error.
RunConfig load_config(const std::string& path);

// CSV emission. Numeric formatting is %.17g so outputs round-trip exactly
// and identical configs give bitwise identical files.
void write_gains_csv(const std::string& path, const GainSet& gains);
void write_phi_csv(const std::string& path, const KernelSolution& sol);
void write_snapshots_csv(const std::string& path, const TimeSeries& series,
                         const SpatialGrid& grid);
// One row per snapshot; vlyap may be empty (written as nan).
void write_energy_csv(const std::string& path, const TimeSeries& series,
                      const std::vector<double>& vlyap);
void write_controls_csv(const std::string& path, const TimeSeries& series,
                        const BeamParams& params);

struct SweepRow {
    double delta1 = 0.0, delta2 = 0.0;
    double c2 = 0.0;
    double fitted_rate = 0.0;
    double final_energy_ratio = 0.0;
    bool valid = false;
};
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

// Reads a gains.csv back (columns y,k11..l22); used by the verify command to
// cross-check a stored file against a fresh solve.
struct LoadedGains {
    std::vector<double> y;
    std::vector<Mat2> K1, L1;
};
LoadedGains load_gains_csv(const std::string& path);

}  // namespace tbeam
