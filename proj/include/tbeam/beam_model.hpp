#pragma once

#include <vector>

#include "tbeam/errors.hpp"
#include "tbeam/mat2.hpp"

namespace tbeam {

// Non-dimensional beam coefficients. epsilon and mu are the inertia
// coefficients of displacement and rotation, a couples shear to rotation,
// theta and xi are the anti-damping / anti-stiffness coefficients acting at
// the uncontrolled end x = 0.
struct BeamParams {
    double epsilon = 1.0;
    double mu = 2.0;
    double a = 1.0;
    double theta = -1.0;
    double xi = 1.0;
};

// Decay rates assigned to the two boundary ODE states by the feedback design.
struct ControllerParams {
    double delta1 = 5.0;
    double delta2 = 2.0;
};

// Uniform grid on [0,1] with n cells, nodes x_i = i*h.
struct SpatialGrid {
    int n;
    double h;

    explicit SpatialGrid(int cells) : n(cells), h(1.0 / cells) {
        if (cells < 8) throw std::invalid_argument("grid too coarse: n must be >= 8");
    }

    int size() const { return n + 1; }
    double node(int i) const { return i * h; }
};

// Constant matrices of the transport/ODE form of the plant:
//   Z_t =  Sigma Z_x + Lambda1 (Z+Y) + Lambda2 X + int_0^x F (Z+Y) dy
//   Y_t = -Sigma Y_x + Lambda1 (Y+Z) + Lambda2 X + int_0^x F (Z+Y) dy
//   X'  = (A + B2 D) X + (B1 + B2 C) Z(0)
//   Y(0) = C Z(0) + D X,  Z(1) = V
struct SystemMatrices {
    Mat2 Sigma, Lambda1, Lambda2, F, A, B1, B2, C, D;
    double kappa = 0.0;  // 2 / (sqrt(eps) - theta)

    double sigma1() const { return Sigma.m00; }
    double sigma2() const { return Sigma.m11; }
    Mat2 sigma_inv() const { return Mat2::diag(1.0 / Sigma.m00, 1.0 / Sigma.m11); }
};

// Checks admissibility: positive inertia coefficients, theta away from
// sqrt(epsilon), and the supported speed ordering mu > epsilon.
BeamParams validate_params(const BeamParams& p);

void validate_controller(const ControllerParams& c);

// Assembles all nine constant matrices from validated parameters.
SystemMatrices assemble_matrices(const BeamParams& p);

}  // namespace tbeam
