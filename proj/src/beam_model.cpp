#include "tbeam/beam_model.hpp"

#include <cmath>
#include <string>

namespace tbeam {

BeamParams validate_params(const BeamParams& p) {
    if (p.epsilon <= 0.0 || p.mu <= 0.0)
        throw NonPositiveCoefficient("epsilon and mu must be positive (epsilon=" +
                                     std::to_string(p.epsilon) + ", mu=" + std::to_string(p.mu) + ")");
    const double se = std::sqrt(p.epsilon);
    // Exact equality theta == sqrt(eps) makes the x=0 boundary condition
    // ill-posed; reject a small neighborhood, not just the exact value.
    if (std::fabs(p.theta - se) < 1e-9 * std::max(1.0, se))
        throw IllPosedAntiDamping("theta is too close to sqrt(epsilon): " +
                                  std::to_string(p.theta) + " vs " + std::to_string(se));
    if (p.mu <= p.epsilon)
        throw UnsupportedSpeedOrdering("only mu > epsilon is supported (mu=" +
                                       std::to_string(p.mu) + ", epsilon=" +
                                       std::to_string(p.epsilon) + ")");
    return p;
}

void validate_controller(const ControllerParams& c) {
    if (c.delta1 <= 0.0 || c.delta2 <= 0.0)
        throw NonPositiveCoefficient("delta1 and delta2 must be positive");
}

SystemMatrices assemble_matrices(const BeamParams& p) {
    const double se = std::sqrt(p.epsilon);
    const double sm = std::sqrt(p.mu);
    const double kappa = 2.0 / (se - p.theta);

    SystemMatrices m;
    m.kappa = kappa;
    m.Sigma = Mat2::diag(1.0 / se, 1.0 / sm);
    m.Lambda1 = {0.0, -1.0 / (2.0 * se),
                 p.a / (2.0 * p.epsilon * sm), 0.0};
    m.Lambda2 = {0.0, 0.0,
                 0.0, -p.a / (p.epsilon * sm)};
    m.F = {0.0, 0.0,
           0.0, -p.a / (2.0 * p.epsilon * sm)};
    m.A = {kappa * p.xi, -kappa,
           0.0, 0.0};
    m.B1 = {kappa, 0.0,
            0.0, 0.0};
    m.B2 = {0.0, 0.0,
            0.0, -1.0 / sm};
    m.C = {-(se + p.theta) / (se - p.theta), 0.0,
           0.0, -1.0};
    m.D = {-kappa * p.xi * se, kappa * se,
           0.0, 0.0};
    return m;
}

}  // namespace tbeam
