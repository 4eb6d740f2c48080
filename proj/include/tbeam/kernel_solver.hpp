#pragma once

#include <vector>

#include "tbeam/beam_model.hpp"

namespace tbeam {

enum class ExecPolicy { serial, parallel };

// 2x2 matrix field on the triangle 0 <= y <= x <= 1, nodes (x_i, y_j), j <= i.
struct TriangularField {
    int n = 0;
    std::vector<Mat2> data;

    TriangularField() = default;
    explicit TriangularField(int cells) : n(cells), data((cells + 1) * (cells + 2) / 2) {}

    static int index(int i, int j) { return i * (i + 1) / 2 + j; }

    const Mat2& at(int i, int j) const { return data[index(i, j)]; }
    Mat2& at(int i, int j) { return data[index(i, j)]; }

    // Linear interpolation in y along level i, y clamped to [0, x_i].
    Mat2 interp_level(int i, double y, double h) const {
        if (i == 0) return at(0, 0);
        double t = y / h;
        if (t <= 0.0) return at(i, 0);
        if (t >= i) return at(i, i);
        const int j = static_cast<int>(t);
        const double w = t - j;
        return (1.0 - w) * at(i, j) + w * at(i, j + 1);
    }
};

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 200;
    ExecPolicy policy = ExecPolicy::parallel;
    // Debug switch: use the additive constant a/(2 eps) in omega21 instead of
    // the consistency-derived a/(2 eps sqrt(mu)). Off in normal operation.
    bool omega21_alt_constant = false;
};

// Converged kernels K, L on the triangle, the gain function Phi on [0,1], and
// the absorption entry omega21 sampled at grid nodes.
struct KernelSolution {
    int n = 0;
    double h = 0.0;
    TriangularField K, L;
    std::vector<Mat2> phi;
    std::vector<double> omega21;
    int iterations = 0;
    double last_delta = 0.0;
    BeamParams params;
    ControllerParams ctrl;
};

// Closed-form diagonal traces implied by the boundary conditions.
Mat2 l_diagonal_closed_form(const SystemMatrices& m);
double k12_diagonal_closed_form(const SystemMatrices& m);

// Design value Phi(0): the unique choice making the closed-loop ODE matrix
// E1 = (B1 + B2 C) Phi(0) + A + B2 D equal to diag(-delta1, -delta2).
Mat2 design_phi0(const BeamParams& p, const ControllerParams& c);

// Fixed-point solve of the coupled Goursat kernel equations by integrating
// along characteristics from boundary data, with the Phi ODE advanced by
// classical RK4 each sweep.
KernelSolution solve_kernels(const BeamParams& params, const ControllerParams& ctrl,
                             const SpatialGrid& grid, const SolverOptions& opt = {});

// Independent verification oracle: finite-difference residuals of both kernel
// PDEs, the three boundary conditions and the Phi ODE on a solved kernel set.
// Stencils that straddle the k12 characteristic discontinuity are excluded
// from the PDE residual (the PDE holds classically only off that line).
// Residuals are reported relative to the solution size, 1 + max|kernel| for
// the PDE/BC entries and 1 + max|Phi| for the ODE.
struct ResidualReport {
    double pde_K = 0.0;
    double pde_L = 0.0;
    double bc_diag_L = 0.0;
    double bc_diag_K = 0.0;
    double bc_y0 = 0.0;
    double ode_phi = 0.0;
    double omega_consistency = 0.0;
    double sup_K = 0.0;
    double sup_L = 0.0;
    double sup_phi = 0.0;
    int excluded_nodes = 0;

    double max_residual() const;
};

ResidualReport kernel_residuals(const KernelSolution& sol, const BeamParams& params,
                                const ControllerParams& ctrl, const SpatialGrid& grid);

// Gain rows at x = 1 plus jump-aware y-derivative rows for the physical
// control law. y_star is the intersection of the k12 discontinuity line
// y = (sigma2/sigma1) x with x = 1; one-sided values there are linear
// extrapolations from each side.
struct GainSet {
    int n = 0;
    double h = 0.0;
    std::vector<Mat2> K1, L1;    // K(1, y_j), L(1, y_j)
    std::vector<Mat2> K1y, L1y;  // d/dy rows, jump-aware stencils
    Mat2 phi1;
    double y_star = 0.0;
    int jump_lo = -1, jump_hi = -1;           // nodes bracketing y_star
    Mat2 K_below, K_above, L_below, L_above;  // one-sided values at y_star
    int detected_jump_index = -1;             // adjacent-difference outlier test on k12
    double detected_jump_size = 0.0;
    double detected_jump_median = 0.0;

    Mat2 K_jump() const { return K_above - K_below; }
    Mat2 L_jump() const { return L_above - L_below; }
    bool jump_detected() const { return detected_jump_index >= 0; }
};

GainSet extract_gains(const KernelSolution& sol, const SpatialGrid& grid);

// One-sided values of K(x_i, .) at the separatrix ordinate y = (s2/s1) x_i,
// for jump-aware quadrature of rows other than x = 1. lo = -1 when the row
// is too short to straddle the line.
struct RowJumpInfo {
    int lo = -1, hi = -1;
    double y_star = 0.0;
    Mat2 K_below, K_above;
};

RowJumpInfo row_jump_info(const KernelSolution& sol, int i);

}  // namespace tbeam
