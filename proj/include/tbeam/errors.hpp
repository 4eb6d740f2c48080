#pragma once

#include <stdexcept>
#include <string>

namespace tbeam {

struct IllPosedAntiDamping : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveCoefficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedSpeedOrdering : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    double last_residual;
    NonConvergence(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
};

struct CFLViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteState : std::runtime_error {
    double time;
    NonFiniteState(const std::string& what, double t)
        : std::runtime_error(what), time(t) {}
};

struct NonPositiveEnergy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tbeam
