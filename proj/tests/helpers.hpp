#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "tbeam/analysis.hpp"

namespace tbeam::test {

inline BeamParams ref_params() { return {1.0, 2.0, 1.0, -1.0, 1.0}; }
inline ControllerParams ref_ctrl() { return {5.0, 2.0}; }

constexpr double kPi = 3.14159265358979323846;

inline PhysicalState smooth_state(const SpatialGrid& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhysicalState ps = PhysicalState::zero(g);
    double c[16];
    for (double& v : c) v = u(rng);
    for (int i = 0; i <= g.n; ++i) {
        const double x = g.node(i);
        ps.u[i] = c[0] + c[1] * x + c[2] * x * x + c[3] * std::sin(kPi * x);
        ps.alpha[i] = c[4] + c[5] * x + c[6] * x * x + c[7] * std::cos(kPi * x);
        ps.ut[i] = c[8] + c[9] * x + c[10] * x * x + c[11] * std::sin(2.0 * kPi * x);
        ps.alphat[i] = c[12] + c[13] * x + c[14] * x * x + c[15] * std::cos(2.0 * kPi * x);
    }
    return ps;
}

inline double sup_abs(const PhysicalState& ps) {
    double m = 0.0;
    for (std::size_t i = 0; i < ps.u.size(); ++i)
        m = std::max({m, std::fabs(ps.u[i]), std::fabs(ps.alpha[i]), std::fabs(ps.ut[i]),
                      std::fabs(ps.alphat[i])});
    return m;
}

inline double sup_abs(const RiemannState& rs) {
    double m = std::max(std::fabs(rs.x1), std::fabs(rs.x2));
    for (std::size_t i = 0; i < rs.p.size(); ++i)
        m = std::max({m, std::fabs(rs.p[i]), std::fabs(rs.q[i]), std::fabs(rs.r[i]),
                      std::fabs(rs.s[i])});
    return m;
}

inline double max_diff(const RiemannState& a, const RiemannState& b) {
    double m = std::max(std::fabs(a.x1 - b.x1), std::fabs(a.x2 - b.x2));
    for (std::size_t i = 0; i < a.p.size(); ++i)
        m = std::max({m, std::fabs(a.p[i] - b.p[i]), std::fabs(a.q[i] - b.q[i]),
                      std::fabs(a.r[i] - b.r[i]), std::fabs(a.s[i] - b.s[i])});
    return m;
}

inline double max_diff(const PhysicalState& a, const PhysicalState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.u.size(); ++i)
        m = std::max({m, std::fabs(a.u[i] - b.u[i]), std::fabs(a.alpha[i] - b.alpha[i]),
                      std::fabs(a.ut[i] - b.ut[i]), std::fabs(a.alphat[i] - b.alphat[i])});
    return m;
}

// Smooth state, flat at both ends, whose boundary rows are then corrected so
// the closed-loop inflow condition Z(1) = V(state) holds exactly at t = 0.
inline RiemannState compatible_closed_loop_state(const SpatialGrid& grid, const BeamParams& p,
                                                 const GainSet& g) {
    PhysicalState ps = PhysicalState::zero(grid);
    for (int i = 0; i <= grid.n; ++i) {
        const double x = grid.node(i);
        const double b = 16.0 * x * x * (1 - x) * (1 - x);
        ps.u[i] = 1.5 * b * std::sin(2.0 * kPi * x);
        ps.alpha[i] = 0.8 * b * std::cos(kPi * x);
        ps.ut[i] = 2.0 * b * (0.5 - x);
        ps.alphat[i] = 0.6 * b * std::sin(3.0 * kPi * x);
    }
    RiemannState rs = to_riemann(ps, p, grid);

    const int n = grid.n;
    std::vector<double> ramp(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        const double x = grid.node(i);
        if (x < 0.8) continue;
        const double r = (x - 0.8) / 0.2;
        ramp[i] = r * r * (3.0 - 2.0 * r);
    }
    for (int it = 0; it < 3; ++it) {
        Mat2 Mk = Mat2::zero();
        for (int j = 0; j < n; ++j)
            Mk += 0.5 * grid.h * (ramp[j] * g.K1[j] + ramp[j + 1] * g.K1[j + 1]);
        const Vec2 v = control_riemann(rs, g, grid);
        const Vec2 r0{v.a - rs.p[n], v.b - rs.r[n]};
        const Vec2 d = (Mat2::identity() - Mk).inverse() * r0;
        for (int i = 0; i <= n; ++i) {
            rs.p[i] += d.a * ramp[i];
            rs.r[i] += d.b * ramp[i];
        }
    }
    return rs;
}

}  // namespace tbeam::test
