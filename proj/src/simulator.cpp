#include "tbeam/simulator.hpp"

#include <cmath>

#include "tbeam/analysis.hpp"

namespace tbeam {

namespace {

constexpr double kDivergenceGuard = 1e12;

void check_cfl(double dt, const SystemMatrices& m, double h) {
    const double speed = std::max(m.sigma1(), m.sigma2());
    if (dt * speed / h > 1.0 + 1e-12)
        throw CFLViolation("dt * max speed / h = " + std::to_string(dt * speed / h) + " > 1");
}

double state_sup(const RiemannState& rs) {
    double sup = std::max(std::fabs(rs.x1), std::fabs(rs.x2));
    for (std::size_t i = 0; i < rs.p.size(); ++i)
        sup = std::max({sup, std::fabs(rs.p[i]), std::fabs(rs.q[i]), std::fabs(rs.r[i]),
                        std::fabs(rs.s[i])});
    return sup;
}

// Transport + couplings + ODE advance; the inflow nodes p(1), r(1) are left
// untouched for the caller to impose.
RiemannState advance(const RiemannState& rs, const SystemMatrices& m, double dt,
                     const SpatialGrid& grid, ExecPolicy policy) {
    const int n = grid.n;
    const double h = grid.h;
    const double s1 = m.sigma1(), s2 = m.sigma2();
    const double nu1 = dt * s1 / h, nu2 = dt * s2 / h;

    // Shared source of the Z and Y rows: Lambda1 (Z+Y) + Lambda2 X + F I(x),
    // I the cumulative trapezoid of (Z+Y).
    std::vector<double> w1(n + 1), w2(n + 1), I1(n + 1, 0.0), I2(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        w1[i] = rs.p[i] + rs.q[i];
        w2[i] = rs.r[i] + rs.s[i];
    }
    for (int i = 1; i <= n; ++i) {
        I1[i] = I1[i - 1] + 0.5 * h * (w1[i - 1] + w1[i]);
        I2[i] = I2[i - 1] + 0.5 * h * (w2[i - 1] + w2[i]);
    }
    const Vec2 X{rs.x1, rs.x2};
    std::vector<double> src1(n + 1), src2(n + 1);
    for (int i = 0; i <= n; ++i) {
        const Vec2 s = m.Lambda1 * Vec2{w1[i], w2[i]} + m.Lambda2 * X + m.F * Vec2{I1[i], I2[i]};
        src1[i] = s.a;
        src2[i] = s.b;
    }

    RiemannState out = rs;
    auto transport = [&](int i) {
        if (i < n) {
            out.p[i] = rs.p[i] + nu1 * (rs.p[i + 1] - rs.p[i]) + dt * src1[i];
            out.r[i] = rs.r[i] + nu2 * (rs.r[i + 1] - rs.r[i]) + dt * src2[i];
        }
        if (i > 0) {
            out.q[i] = rs.q[i] - nu1 * (rs.q[i] - rs.q[i - 1]) + dt * src1[i];
            out.s[i] = rs.s[i] - nu2 * (rs.s[i] - rs.s[i - 1]) + dt * src2[i];
        }
    };
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i <= n; ++i) transport(i);
    } else {
        for (int i = 0; i <= n; ++i) transport(i);
    }

    // Boundary ODEs by explicit midpoint, boundary trace averaged in time.
    const Mat2 AX = m.A + m.B2 * m.D;
    const Mat2 BZ = m.B1 + m.B2 * m.C;
    const Vec2 Z0_old{rs.p[0], rs.r[0]};
    const Vec2 Z0_new{out.p[0], out.r[0]};
    const Vec2 k1 = AX * X + BZ * Z0_old;
    const Vec2 Xmid = X + (0.5 * dt) * k1;
    const Vec2 k2 = AX * Xmid + BZ * (0.5 * (Z0_old + Z0_new));
    const Vec2 Xn = X + dt * k2;
    out.x1 = Xn.a;
    out.x2 = Xn.b;

    // Uncontrolled-end conditions Y(0) = C Z(0) + D X at the new level.
    const Vec2 Y0 = m.C * Vec2{out.p[0], out.r[0]} + m.D * Xn;
    out.q[0] = Y0.a;
    out.s[0] = Y0.b;
    return out;
}

}  // namespace

RiemannState step(const RiemannState& rs, const SystemMatrices& mats, const BeamParams& params,
                  Vec2 control, double dt, const SpatialGrid& grid, ExecPolicy policy) {
    (void)params;
    check_cfl(dt, mats, grid.h);
    RiemannState out = advance(rs, mats, dt, grid, policy);
    out.p[grid.n] = control.a;
    out.r[grid.n] = control.b;
    return out;
}

TimeSeries simulate(const PhysicalState& initial, const BeamParams& params,
                    const ControllerParams& ctrl, const SimConfig& cfg, const GainSet* gains) {
    validate_params(params);
    validate_controller(ctrl);
    if (cfg.cfl <= 0.0 || cfg.cfl > 1.0)
        throw std::invalid_argument("cfl must lie in (0, 1]");
    if (cfg.t_final <= 0.0) throw std::invalid_argument("t_final must be positive");
    if (cfg.mode == SimMode::closed_loop && gains == nullptr)
        throw std::invalid_argument("closed-loop simulation requires solved gains");

    const SpatialGrid grid(static_cast<int>(initial.u.size()) - 1);
    if (gains && gains->n != grid.n)
        throw GridMismatch("simulate: gain grid does not match initial state");

    const SystemMatrices mats = assemble_matrices(params);
    const double dt = cfg.cfl * grid.h * std::sqrt(params.epsilon);
    check_cfl(dt, mats, grid.h);
    const int steps = static_cast<int>(std::floor(cfg.t_final / dt + 1e-9));
    const int stride = cfg.snapshot_stride > 0 ? cfg.snapshot_stride : std::max(1, steps / 200);

    TimeSeries ts;
    ts.dt = dt;
    ts.times.reserve(steps + 1);
    ts.energy.reserve(steps + 1);
    ts.Vp.reserve(steps + 1);
    ts.Vr.reserve(steps + 1);

    RiemannState rs = to_riemann(initial, params, grid);

    auto record = [&](int k, double t, const RiemannState& state) {
        ts.times.push_back(t);
        ts.Vp.push_back(state.p[grid.n]);
        ts.Vr.push_back(state.r[grid.n]);
        const PhysicalState ps = from_riemann(state, params, grid);
        ts.ut1.push_back(ps.ut[grid.n]);
        ts.alphat1.push_back(ps.alphat[grid.n]);
        ts.energy.push_back(energy_h1(ps, grid));
        if (k % stride == 0 || k == steps) ts.snapshots.push_back({t, k, state, ps});
    };
    record(0, 0.0, rs);

    for (int k = 1; k <= steps; ++k) {
        const double t = k * dt;
        RiemannState next;
        if (cfg.mode == SimMode::closed_loop) {
            const Vec2 v = control_riemann(rs, *gains, grid);
            next = step(rs, mats, params, v, dt, grid, cfg.policy);
        } else {
            next = advance(rs, mats, dt, grid, cfg.policy);
            next.p[grid.n] = -next.q[grid.n];
            next.r[grid.n] = -next.s[grid.n];
        }

        const double sup = state_sup(next);
        if (!std::isfinite(sup) || sup > kDivergenceGuard) {
            if (cfg.mode == SimMode::open_loop) {
                ts.diverged = true;
                ts.divergence_time = t;
                break;
            }
            throw NonFiniteState("state magnitude exceeded divergence guard", t);
        }
        rs = std::move(next);
        record(k, t, rs);
    }
    return ts;
}

}  // namespace tbeam
