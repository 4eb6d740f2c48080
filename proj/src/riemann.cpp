#include "tbeam/riemann.hpp"

#include <cmath>

namespace tbeam {

namespace {

void require_size(std::size_t got, const SpatialGrid& grid, const char* what) {
    if (got != static_cast<std::size_t>(grid.size()))
        throw GridMismatch(std::string(what) + ": array length does not match grid");
}

// Second-order first derivative on a uniform grid.
std::vector<double> derivative(const std::vector<double>& f, double h) {
    const int m = static_cast<int>(f.size()) - 1;
    std::vector<double> d(f.size());
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i < m; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
    return d;
}

std::vector<double> cumtrapz(const std::vector<double>& f, double h) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

}  // namespace

RiemannState to_riemann(const PhysicalState& ps, const BeamParams& params, const SpatialGrid& grid) {
    require_size(ps.u.size(), grid, "u");
    require_size(ps.alpha.size(), grid, "alpha");
    require_size(ps.ut.size(), grid, "ut");
    require_size(ps.alphat.size(), grid, "alphat");

    const double se = std::sqrt(params.epsilon);
    const double sm = std::sqrt(params.mu);
    const auto ux = derivative(ps.u, grid.h);
    const auto ax = derivative(ps.alpha, grid.h);

    RiemannState rs = RiemannState::zero(grid);
    for (int i = 0; i <= grid.n; ++i) {
        rs.p[i] = ux[i] + se * ps.ut[i];
        rs.q[i] = ux[i] - se * ps.ut[i];
        rs.r[i] = ax[i] + sm * ps.alphat[i];
        rs.s[i] = ax[i] - sm * ps.alphat[i];
    }
    rs.x1 = ps.u[0];
    rs.x2 = ps.alpha[0];
    return rs;
}

PhysicalState from_riemann(const RiemannState& rs, const BeamParams& params, const SpatialGrid& grid) {
    require_size(rs.p.size(), grid, "p");
    require_size(rs.q.size(), grid, "q");
    require_size(rs.r.size(), grid, "r");
    require_size(rs.s.size(), grid, "s");

    const double se = std::sqrt(params.epsilon);
    const double sm = std::sqrt(params.mu);

    std::vector<double> half_pq(grid.size()), half_rs(grid.size());
    for (int i = 0; i <= grid.n; ++i) {
        half_pq[i] = 0.5 * (rs.p[i] + rs.q[i]);
        half_rs[i] = 0.5 * (rs.r[i] + rs.s[i]);
    }
    const auto iu = cumtrapz(half_pq, grid.h);
    const auto ia = cumtrapz(half_rs, grid.h);

    PhysicalState ps = PhysicalState::zero(grid);
    for (int i = 0; i <= grid.n; ++i) {
        ps.u[i] = rs.x1 + iu[i];
        ps.alpha[i] = rs.x2 + ia[i];
        ps.ut[i] = (rs.p[i] - rs.q[i]) / (2.0 * se);
        ps.alphat[i] = (rs.r[i] - rs.s[i]) / (2.0 * sm);
    }
    return ps;
}

PhysicalState default_initial_state(const SpatialGrid& grid) {
    PhysicalState ps = PhysicalState::zero(grid);
    for (int i = 0; i <= grid.n; ++i) {
        const double x = grid.node(i);
        ps.u[i] = 2.8 - 2.8 * x - 1.8 * x * x;
        ps.alpha[i] = x * x;
    }
    return ps;
}

CompatibilityReport check_compatibility(const PhysicalState& ps, const BeamParams& params,
                                        const SpatialGrid& grid) {
    require_size(ps.u.size(), grid, "u");
    const auto ux = derivative(ps.u, grid.h);
    const auto ax = derivative(ps.alpha, grid.h);

    CompatibilityReport rep;
    rep.shear_bc_residual =
        ux[0] - (ps.alpha[0] - params.theta * ps.ut[0] - params.xi * ps.u[0]);
    rep.rotation_bc_residual = ax[0];

    double scale = 1.0;
    for (int i = 0; i <= grid.n; ++i)
        scale = std::max({scale, std::fabs(ps.u[i]), std::fabs(ps.alpha[i]),
                          std::fabs(ps.ut[i]), std::fabs(ps.alphat[i])});
    rep.tol = 1e-6 * scale;
    rep.compatible = std::fabs(rep.shear_bc_residual) <= rep.tol &&
                     std::fabs(rep.rotation_bc_residual) <= rep.tol;
    return rep;
}

}  // namespace tbeam
