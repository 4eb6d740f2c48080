#include "tbeam/backstepping.hpp"

#include <cmath>

namespace tbeam {

namespace {

void require_grid(int n, const SpatialGrid& grid, const char* what) {
    if (n != grid.n) throw GridMismatch(std::string(what) + ": grid size mismatch");
}

Mat2 extrap_pair(const std::vector<Mat2>& row, int j0, int j1, double y, double h) {
    const double w = (y - j0 * h) / ((j1 - j0) * h);
    return (1.0 - w) * row[j0] + w * row[j1];
}

// Trapezoid of G(y) W(y) over [0,1]. When lo >= 0 the cell [lo,hi] containing
// ystar is integrated in two pieces with the one-sided values Gb, Ga of G at
// ystar, so the quadrature never averages across the kernel jump.
Vec2 row_state_quad(const std::vector<Mat2>& G, const std::vector<Vec2>& W, double h,
                    int lo, int hi, double ystar, const Mat2& Gb, const Mat2& Ga) {
    const int n = static_cast<int>(G.size()) - 1;
    Vec2 acc{};
    for (int j = 0; j < n; ++j) {
        if (lo >= 0 && j == lo) continue;
        acc += 0.5 * h * (G[j] * W[j] + G[j + 1] * W[j + 1]);
    }
    if (lo >= 0) {
        const double ylo = lo * h, yhi = hi * h;
        const double w = (ystar - ylo) / (yhi - ylo);
        const Vec2 Wstar = (1.0 - w) * W[lo] + w * W[hi];
        acc += 0.5 * (ystar - ylo) * (G[lo] * W[lo] + Gb * Wstar);
        acc += 0.5 * (yhi - ystar) * (Ga * Wstar + G[hi] * W[hi]);
    }
    return acc;
}

// Node weights W_j for int_0^{x_i} K(x_i,y) Z(y) dy. The cell straddling the
// k12 separatrix is split at the line with one-sided kernel values, so the
// quadrature never averages across the jump. Shared by the forward transform
// and its inverse, which keeps them exact inverses of each other.
std::vector<Mat2> k_row_weights(const KernelSolution& kernels, int i, double h) {
    std::vector<Mat2> W(i + 1, Mat2::zero());
    if (i == 0) return W;
    const RowJumpInfo ji = row_jump_info(kernels, i);
    for (int j = 0; j < i; ++j) {
        if (ji.lo >= 0 && j == ji.lo) continue;
        W[j] += 0.5 * h * kernels.K.at(i, j);
        W[j + 1] += 0.5 * h * kernels.K.at(i, j + 1);
    }
    if (ji.lo >= 0) {
        const int lo = ji.lo, hi = ji.hi;
        const double a = ji.y_star - lo * h, b = hi * h - ji.y_star;
        const double w = a / (a + b);
        W[lo] += 0.5 * a * (kernels.K.at(i, lo) + (1.0 - w) * ji.K_below) +
                 0.5 * b * (1.0 - w) * ji.K_above;
        W[hi] += 0.5 * a * w * ji.K_below +
                 0.5 * b * (w * ji.K_above + kernels.K.at(i, hi));
    }
    return W;
}

}  // namespace

TargetMatrices target_matrices(const SystemMatrices& mats, const Mat2& phi0) {
    TargetMatrices t;
    t.E1 = (mats.B1 + mats.B2 * mats.C) * phi0 + mats.A + mats.B2 * mats.D;
    t.E2 = mats.C * phi0 + mats.D;
    t.E3 = mats.B1 + mats.B2 * mats.C;
    return t;
}

Vec2 control_riemann(const RiemannState& rs, const GainSet& gains, const SpatialGrid& grid) {
    require_grid(gains.n, grid, "control_riemann");
    if (static_cast<int>(rs.p.size()) != grid.size())
        throw GridMismatch("control_riemann: state length mismatch");

    const int n = grid.n;
    std::vector<Vec2> Z(n + 1), Y(n + 1);
    for (int j = 0; j <= n; ++j) {
        Z[j] = rs.Z(j);
        Y[j] = rs.Y(j);
    }
    Vec2 v = row_state_quad(gains.K1, Z, grid.h, gains.jump_lo, gains.jump_hi, gains.y_star,
                            gains.K_below, gains.K_above);
    v += row_state_quad(gains.L1, Y, grid.h, gains.jump_lo, gains.jump_hi, gains.y_star,
                        gains.L_below, gains.L_above);
    v += gains.phi1 * rs.X();
    return v;
}

Vec2 control_physical(const PhysicalState& ps, const GainSet& gains, const BeamParams& params,
                      const SpatialGrid& grid) {
    require_grid(gains.n, grid, "control_physical");
    if (static_cast<int>(ps.u.size()) != grid.size())
        throw GridMismatch("control_physical: state length mismatch");

    const int n = grid.n;
    const double h = grid.h;
    const double se = std::sqrt(params.epsilon);
    const double sm = std::sqrt(params.mu);

    std::vector<Mat2> S(n + 1), Dv(n + 1), M(n + 1);
    for (int j = 0; j <= n; ++j) {
        S[j] = gains.K1[j] + gains.L1[j];
        Dv[j] = gains.K1y[j] + gains.L1y[j];
        M[j] = gains.K1[j] - gains.L1[j];
    }

    std::vector<Vec2> W(n + 1), Wt(n + 1);
    for (int j = 0; j <= n; ++j) {
        W[j] = {ps.u[j], ps.alpha[j]};
        Wt[j] = {se * ps.ut[j], sm * ps.alphat[j]};
    }

    const int lo = gains.jump_lo, hi = gains.jump_hi;
    Mat2 Dv_b, Dv_a, M_b, M_a, S_jump = Mat2::zero();
    if (lo >= 0) {
        Dv_b = extrap_pair(Dv, std::max(lo - 1, 0), lo, gains.y_star, h);
        Dv_a = extrap_pair(Dv, hi, std::min(hi + 1, n), gains.y_star, h);
        M_b = gains.K_below - gains.L_below;
        M_a = gains.K_above - gains.L_above;
        S_jump = (gains.K_above + gains.L_above) - (gains.K_below + gains.L_below);
    }

    Vec2 v{};
    v -= row_state_quad(Dv, W, h, lo, hi, gains.y_star, Dv_b, Dv_a);
    v += row_state_quad(M, Wt, h, lo, hi, gains.y_star, M_b, M_a);
    v += S[n] * Vec2{ps.u[n], ps.alpha[n]};
    v -= (S[0] - gains.phi1) * Vec2{ps.u[0], ps.alpha[0]};
    v -= Vec2{se * ps.ut[n], sm * ps.alphat[n]};
    if (lo >= 0) {
        // Distributional part of the y-derivative across the kernel jump.
        const double w = (gains.y_star - lo * h) / ((hi - lo) * h);
        const Vec2 Wstar = (1.0 - w) * W[lo] + w * W[hi];
        v -= S_jump * Wstar;
    }
    return v;
}

ControlSignal full_control(const RiemannState& rs, const PhysicalState& ps, const GainSet& gains,
                           const BeamParams& params, const SpatialGrid& grid) {
    const Vec2 vpr = control_riemann(rs, gains, grid);
    const Vec2 v12 = control_physical(ps, gains, params, grid);
    return {vpr.a, vpr.b, v12.a, v12.b};
}

TargetState transform_to_target(const RiemannState& rs, const KernelSolution& kernels,
                                const SpatialGrid& grid, ExecPolicy policy) {
    require_grid(kernels.n, grid, "transform_to_target");
    if (static_cast<int>(rs.p.size()) != grid.size())
        throw GridMismatch("transform_to_target: state length mismatch");

    const int n = grid.n;
    const double h = grid.h;
    TargetState ts = TargetState::zero(grid);
    ts.X = rs.X();

    std::vector<Vec2> Z(n + 1), Y(n + 1);
    for (int j = 0; j <= n; ++j) {
        Z[j] = rs.Z(j);
        Y[j] = rs.Y(j);
        ts.psi[j] = Y[j];
    }

    auto body = [&](int i) {
        Vec2 acc{};
        if (i > 0) {
            const std::vector<Mat2> W = k_row_weights(kernels, i, h);
            for (int j = 0; j <= i; ++j) {
                const double wl = (j == 0 || j == i) ? 0.5 * h : h;
                acc += W[j] * Z[j] + wl * (kernels.L.at(i, j) * Y[j]);
            }
        }
        ts.sigma[i] = Z[i] - acc - kernels.phi[i] * ts.X;
    };
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i <= n; ++i) body(i);
    } else {
        for (int i = 0; i <= n; ++i) body(i);
    }
    return ts;
}

RiemannState invert_transform(const TargetState& ts, const KernelSolution& kernels,
                              const SpatialGrid& grid) {
    require_grid(kernels.n, grid, "invert_transform");
    if (static_cast<int>(ts.sigma.size()) != grid.size())
        throw GridMismatch("invert_transform: state length mismatch");

    const int n = grid.n;
    const double h = grid.h;
    std::vector<Vec2> Z(n + 1);
    Z[0] = ts.sigma[0] + kernels.phi[0] * ts.X;
    for (int i = 1; i <= n; ++i) {
        const std::vector<Mat2> W = k_row_weights(kernels, i, h);
        Vec2 rhs = ts.sigma[i] + kernels.phi[i] * ts.X;
        for (int j = 0; j < i; ++j) rhs += W[j] * Z[j];
        for (int j = 0; j <= i; ++j) {
            const double w = (j == 0 || j == i) ? 0.5 * h : h;
            rhs += w * (kernels.L.at(i, j) * ts.psi[j]);
        }
        const Mat2 lhs = Mat2::identity() - W[i];
        Z[i] = lhs.inverse() * rhs;
    }

    RiemannState rs = RiemannState::zero(grid);
    for (int i = 0; i <= n; ++i) {
        rs.p[i] = Z[i].a;
        rs.r[i] = Z[i].b;
        rs.q[i] = ts.psi[i].a;
        rs.s[i] = ts.psi[i].b;
    }
    rs.x1 = ts.X.a;
    rs.x2 = ts.X.b;
    return rs;
}

InverseKernels inverse_kernels(const KernelSolution& kernels, const SpatialGrid& grid,
                               ExecPolicy policy) {
    require_grid(kernels.n, grid, "inverse_kernels");
    const int n = grid.n;
    const double h = grid.h;

    InverseKernels inv;
    inv.n = n;
    inv.Kb = TriangularField(n);
    inv.Lb = TriangularField(n);
    inv.phib.assign(n + 1, Mat2::zero());

    auto row_body = [&](int i) {
        inv.Kb.at(i, i) = kernels.K.at(i, i);
        for (int j = i - 1; j >= 0; --j) {
            Mat2 rhs = kernels.K.at(i, j);
            for (int s = j + 1; s <= i; ++s) {
                const double w = (s == i) ? 0.5 * h : h;
                rhs += w * (inv.Kb.at(i, s) * kernels.K.at(s, j));
            }
            const Mat2 lhs = Mat2::identity() - (0.5 * h) * kernels.K.at(j, j);
            inv.Kb.at(i, j) = rhs * lhs.inverse();
        }
        for (int j = i; j >= 0; --j) {
            Mat2 acc = kernels.L.at(i, j);
            if (j < i) {
                for (int s = j; s <= i; ++s) {
                    const double w = (s == j || s == i) ? 0.5 * h : h;
                    acc += w * (inv.Kb.at(i, s) * kernels.L.at(s, j));
                }
            }
            inv.Lb.at(i, j) = acc;
        }
    };
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i <= n; ++i) row_body(i);
    } else {
        for (int i = 0; i <= n; ++i) row_body(i);
    }

    for (int i = 0; i <= n; ++i) {
        Mat2 acc = kernels.phi[i];
        if (i > 0) {
            for (int s = 0; s <= i; ++s) {
                const double w = (s == 0 || s == i) ? 0.5 * h : h;
                acc += w * (inv.Kb.at(i, s) * kernels.phi[s]);
            }
        }
        inv.phib[i] = acc;
    }
    return inv;
}

XiKernels xi_kernels(const InverseKernels& inv, const SystemMatrices& mats,
                     const SpatialGrid& grid) {
    if (inv.n != grid.n) throw GridMismatch("xi_kernels: grid size mismatch");
    const int n = grid.n;
    const double h = grid.h;

    XiKernels xi;
    xi.Xi1.assign(n + 1, Mat2::zero());
    xi.Xi2 = TriangularField(n);
    xi.Xi3 = TriangularField(n);

    Mat2 cum = Mat2::zero();
    xi.Xi1[0] = mats.Lambda1 * inv.phib[0] + mats.Lambda2;
    for (int i = 1; i <= n; ++i) {
        cum += 0.5 * h * (mats.F * inv.phib[i - 1] + mats.F * inv.phib[i]);
        xi.Xi1[i] = mats.Lambda1 * inv.phib[i] + mats.Lambda2 + cum;
    }

    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            Mat2 acc2 = Mat2::zero(), acc3 = Mat2::zero();
            for (int s = j; s < i; ++s) {
                acc2 += 0.5 * h * (mats.F * inv.Kb.at(s, j) + mats.F * inv.Kb.at(s + 1, j));
                acc3 += 0.5 * h * (mats.F * inv.Lb.at(s, j) + mats.F * inv.Lb.at(s + 1, j));
            }
            xi.Xi2.at(i, j) = mats.Lambda1 * inv.Kb.at(i, j) + mats.F + acc2;
            xi.Xi3.at(i, j) = mats.Lambda1 * inv.Lb.at(i, j) + mats.F + acc3;
        }
    }
    return xi;
}

XiKernels xi_kernels(const KernelSolution& kernels, const SystemMatrices& mats,
                     const SpatialGrid& grid, ExecPolicy policy) {
    return xi_kernels(inverse_kernels(kernels, grid, policy), mats, grid);
}

}  // namespace tbeam
