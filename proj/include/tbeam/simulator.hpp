#pragma once

#include <optional>
#include <vector>

#include "tbeam/backstepping.hpp"

namespace tbeam {

enum class SimMode { open_loop, closed_loop };

struct SimConfig {
    double cfl = 0.8;           // Courant number in (0,1]; dt = cfl*h*sqrt(eps)
    double t_final = 20.0;
    int snapshot_stride = 0;    // steps between stored snapshots, 0 = auto
    SimMode mode = SimMode::closed_loop;
    ExecPolicy policy = ExecPolicy::parallel;
};

struct Snapshot {
    double t = 0.0;
    int step = 0;
    RiemannState rs;
    PhysicalState ps;
};

struct TimeSeries {
    std::vector<double> times;    // per step, including t = 0
    std::vector<double> energy;   // H1+L2 energy of the reconstructed state
    std::vector<double> Vp, Vr;   // boundary values actually imposed
    std::vector<double> ut1, alphat1;  // boundary velocities, for V1/V2 recovery
    std::vector<Snapshot> snapshots;
    bool diverged = false;
    double divergence_time = 0.0;
    double dt = 0.0;
};

// One explicit step: first-order upwind transport with the local, integral
// and ODE couplings added at the current level, midpoint integration of the
// boundary ODEs, then imposition of all four boundary conditions with
// Z(1) = (Vp, Vr) given.
RiemannState step(const RiemannState& rs, const SystemMatrices& mats, const BeamParams& params,
                  Vec2 control, double dt, const SpatialGrid& grid,
                  ExecPolicy policy = ExecPolicy::parallel);

// Full run. Closed loop evaluates the Riemann control law each step (gains
// required); open loop realizes V1 = V2 = 0 as p(1) = -q(1), r(1) = -s(1).
// A NonFiniteState in open loop ends the run gracefully with the divergence
// time recorded.
TimeSeries simulate(const PhysicalState& initial, const BeamParams& params,
                    const ControllerParams& ctrl, const SimConfig& cfg,
                    const GainSet* gains = nullptr);

}  // namespace tbeam
