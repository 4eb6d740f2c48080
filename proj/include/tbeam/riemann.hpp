#pragma once

#include <vector>

#include "tbeam/beam_model.hpp"

namespace tbeam {

// Beam state sampled at grid nodes: displacement u, rotation alpha and their
// time derivatives.
struct PhysicalState {
    std::vector<double> u, alpha, ut, alphat;

    static PhysicalState zero(const SpatialGrid& g) {
        PhysicalState s;
        s.u.assign(g.size(), 0.0);
        s.alpha.assign(g.size(), 0.0);
        s.ut.assign(g.size(), 0.0);
        s.alphat.assign(g.size(), 0.0);
        return s;
    }
};

// Characteristic variables plus the two boundary ODE states x1 = u(0),
// x2 = alpha(0).
struct RiemannState {
    std::vector<double> p, q, r, s;
    double x1 = 0.0, x2 = 0.0;

    static RiemannState zero(const SpatialGrid& g) {
        RiemannState z;
        z.p.assign(g.size(), 0.0);
        z.q.assign(g.size(), 0.0);
        z.r.assign(g.size(), 0.0);
        z.s.assign(g.size(), 0.0);
        return z;
    }

    Vec2 Z(int i) const { return {p[i], r[i]}; }
    Vec2 Y(int i) const { return {q[i], s[i]}; }
    Vec2 X() const { return {x1, x2}; }
};

// p = u_x + sqrt(eps) u_t, q = u_x - sqrt(eps) u_t, r/s likewise for alpha.
// Spatial derivatives: second-order central, one-sided at the ends.
RiemannState to_riemann(const PhysicalState& ps, const BeamParams& params, const SpatialGrid& grid);

// u = x1 + 1/2 int_0^x (p+q), alpha = x2 + 1/2 int_0^x (r+s) by cumulative
// trapezoid; u_t = (p-q)/(2 sqrt(eps)), alpha_t = (r-s)/(2 sqrt(mu)).
PhysicalState from_riemann(const RiemannState& rs, const BeamParams& params, const SpatialGrid& grid);

// u0 = 2.8 - 2.8x - 1.8x^2, alpha0 = x^2, zero velocities.
PhysicalState default_initial_state(const SpatialGrid& grid);

// Residuals of the uncontrolled-end boundary conditions on given initial
// data. Incompatible data is flagged, never rejected.
struct CompatibilityReport {
    double shear_bc_residual = 0.0;     // u_x(0) - [alpha(0) - theta u_t(0) - xi u(0)]
    double rotation_bc_residual = 0.0;  // alpha_x(0)
    bool compatible = true;
    double tol = 0.0;
};

CompatibilityReport check_compatibility(const PhysicalState& ps, const BeamParams& params,
                                        const SpatialGrid& grid);

}  // namespace tbeam
