#pragma once

#include <vector>

#include "tbeam/kernel_solver.hpp"
#include "tbeam/riemann.hpp"

namespace tbeam {

// Scalar controls at one instant. Vp, Vr act on the characteristic variables
// at x = 1, V1, V2 are the physical actuation u_x(1), alpha_x(1); they are
// related by Vp = V1 + sqrt(eps) u_t(1), Vr = V2 + sqrt(mu) alpha_t(1).
struct ControlSignal {
    double Vp = 0.0, Vr = 0.0;
    double V1 = 0.0, V2 = 0.0;
};

// Closed-loop ODE matrices of the target system.
//   E1 = (B1 + B2 C) Phi(0) + A + B2 D   (diag(-delta1, -delta2) by design)
//   E2 = C Phi(0) + D
//   E3 = B1 + B2 C
struct TargetMatrices {
    Mat2 E1, E2, E3;
};

TargetMatrices target_matrices(const SystemMatrices& mats, const Mat2& phi0);

// Transformed state: sigma/psi sampled at grid nodes, X the ODE pair.
struct TargetState {
    std::vector<Vec2> sigma, psi;
    Vec2 X;

    static TargetState zero(const SpatialGrid& g) {
        TargetState t;
        t.sigma.assign(g.size(), Vec2{});
        t.psi.assign(g.size(), Vec2{});
        return t;
    }
};

// V = int K(1,y) Z dy + int L(1,y) Y dy + Phi(1) X, trapezoid split at the
// k12 jump ordinate. Returns (Vp, Vr).
Vec2 control_riemann(const RiemannState& rs, const GainSet& gains, const SpatialGrid& grid);

// Physical-variable control law: integrals of u, u_t, alpha, alpha_t against
// the gain rows and their y-derivatives plus boundary and Phi(1) terms.
// Returns (V1, V2).
Vec2 control_physical(const PhysicalState& ps, const GainSet& gains, const BeamParams& params,
                      const SpatialGrid& grid);

ControlSignal full_control(const RiemannState& rs, const PhysicalState& ps, const GainSet& gains,
                           const BeamParams& params, const SpatialGrid& grid);

// sigma(x) = Z(x) - int_0^x [K(x,y) Z(y) + L(x,y) Y(y)] dy - Phi(x) X,
// psi = Y.
TargetState transform_to_target(const RiemannState& rs, const KernelSolution& kernels,
                                const SpatialGrid& grid,
                                ExecPolicy policy = ExecPolicy::parallel);

// Solves the discretized Volterra relation for Z node-by-node in increasing
// x; the exact inverse of transform_to_target at grid level.
RiemannState invert_transform(const TargetState& ts, const KernelSolution& kernels,
                              const SpatialGrid& grid);

// Inverse Volterra kernels via the resolvent identities
//   Kb(x,y) = K(x,y) + int_y^x Kb(x,s) K(s,y) ds
//   Lb(x,y) = L(x,y) + int_y^x Kb(x,s) L(s,y) ds
//   Phib(x) = Phi(x) + int_0^x Kb(x,s) Phi(s) ds
struct InverseKernels {
    int n = 0;
    TriangularField Kb, Lb;
    std::vector<Mat2> phib;
};

InverseKernels inverse_kernels(const KernelSolution& kernels, const SpatialGrid& grid,
                               ExecPolicy policy = ExecPolicy::parallel);

// Source kernels of the target psi equation:
//   Xi1(x)   = Lambda1 Phib(x) + Lambda2 + int_0^x F Phib(y) dy
//   Xi2(x,y) = Lambda1 Kb(x,y) + F + int_y^x F Kb(s,y) ds
//   Xi3(x,y) = Lambda1 Lb(x,y) + F + int_y^x F Lb(s,y) ds
struct XiKernels {
    std::vector<Mat2> Xi1;
    TriangularField Xi2, Xi3;
};

XiKernels xi_kernels(const InverseKernels& inv, const SystemMatrices& mats,
                     const SpatialGrid& grid);

XiKernels xi_kernels(const KernelSolution& kernels, const SystemMatrices& mats,
                     const SpatialGrid& grid, ExecPolicy policy = ExecPolicy::parallel);

}  // namespace tbeam
