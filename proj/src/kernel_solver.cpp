#include "tbeam/kernel_solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tbeam {

namespace {

template <typename F>
void for_each_flat(int total, ExecPolicy policy, F&& f) {
    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (int idx = 0; idx < total; ++idx) f(idx);
    } else {
        for (int idx = 0; idx < total; ++idx) f(idx);
    }
}

// Flat triangle index -> (i, j), j <= i.
inline void unflatten(int idx, int& i, int& j) {
    i = static_cast<int>((std::sqrt(8.0 * idx + 1.0) - 1.0) / 2.0);
    while (TriangularField::index(i + 1, 0) <= idx) ++i;
    while (TriangularField::index(i, 0) > idx) --i;
    j = idx - TriangularField::index(i, 0);
}

inline Mat2 interp_nodes(const std::vector<Mat2>& v, double x, double h, int n) {
    double t = x / h;
    if (t <= 0.0) return v[0];
    if (t >= n) return v[n];
    const int i = static_cast<int>(t);
    const double w = t - i;
    return (1.0 - w) * v[i] + w * v[i + 1];
}

inline double interp_scalar(const std::vector<double>& v, double x, double h, int n) {
    double t = x / h;
    if (t <= 0.0) return v[0];
    if (t >= n) return v[n];
    const int i = static_cast<int>(t);
    const double w = t - i;
    return (1.0 - w) * v[i] + w * v[i + 1];
}

// 4-point Lagrange interpolation on uniform nodes, stencil clamped at the
// ends. Piecewise-linear sampling of the boundary closures would leave
// kinked O(h^2) error fields that finite differencing amplifies by 1/h.
template <typename T>
T cubic_nodes(const std::vector<T>& v, double x, double h, int n) {
    double t = x / h;
    if (t <= 0.0) return v[0];
    if (t >= n) return v[n];
    if (n < 3) {
        const int i = static_cast<int>(t);
        const double w = t - i;
        return (1.0 - w) * v[i] + w * v[i + 1];
    }
    int base = static_cast<int>(t) - 1;
    base = std::max(0, std::min(base, n - 3));
    const double s = t - base;
    const double w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    const double w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    const double w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    const double w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    return w0 * v[base] + w1 * v[base + 1] + w2 * v[base + 2] + w3 * v[base + 3];
}

// Scalar field on the triangle (same layout as TriangularField).
struct TriScalar {
    int n = 0;
    std::vector<double> data;
    TriScalar() = default;
    explicit TriScalar(int cells) : n(cells), data((cells + 1) * (cells + 2) / 2, 0.0) {}
    double at(int i, int j) const { return data[TriangularField::index(i, j)]; }
    double& at(int i, int j) { return data[TriangularField::index(i, j)]; }
};

// Everything one relaxation sweep reads from the previous iterate. The k12
// entry is discontinuous across the characteristic line s1*y = s2*x, so all
// sampling and quadrature involving it is one-sided with respect to that
// line; the remaining entries are continuous and sampled bilinearly.
struct SweepContext {
    const SystemMatrices& m;
    int n;
    double h;
    double s1, s2, c;  // c = s2/s1, slope of the discontinuity line
    const TriangularField& Kp;
    const TriangularField& Lp;
    const std::vector<Mat2>& phi;      // Phi of this sweep
    const std::vector<double>& omega;  // omega of the previous sweep
    TriScalar sufP0, sufP1;            // int_y^x (K+L)(x,s) col-2 ds, rows 0/1
    std::vector<Mat2> Lrow0;           // previous iterate's L(x,0)

    SweepContext(const SystemMatrices& mats, int cells, double spacing,
                 const TriangularField& K_prev, const TriangularField& L_prev,
                 const std::vector<Mat2>& phi_cur, const std::vector<double>& om)
        : m(mats), n(cells), h(spacing), s1(mats.sigma1()), s2(mats.sigma2()), c(s2 / s1),
          Kp(K_prev), Lp(L_prev), phi(phi_cur), omega(om), sufP0(cells), sufP1(cells),
          Lrow0(cells + 1) {
        for (int i = 0; i <= n; ++i) {
            Lrow0[i] = Lp.at(i, 0);
            build_col2_integrals(i);
        }
    }

    // Full-range col-2 integrals of (K+L) at level i, for the Phi ODE.
    double g0(int i) const { return sufP0.at(i, 0); }
    double g1(int i) const { return sufP1.at(i, 0); }

    // First node of the diagonal-family side at level i.
    int j_above(int i) const {
        const int j = static_cast<int>(std::ceil(c * i - 1e-9));
        return std::max(0, j);
    }

    // One-sided linear sample of k12 at level i, side +1 = diagonal family,
    // side -1 = y=0 family. Extrapolates from the two nearest same-side
    // nodes when the target ordinate lies in the crossing cell.
    double k12_level(int i, double y, int side) const {
        if (i == 0) return Kp.at(0, 0).m01;
        const int ja = j_above(i);
        const double t = y / h;
        int j0;
        if (side > 0) {
            if (ja >= i) return Kp.at(i, i).m01;
            j0 = std::max(ja, std::min(static_cast<int>(std::floor(t)), i - 1));
        } else {
            if (ja <= 1) return Kp.at(i, 0).m01;
            j0 = std::max(0, std::min(static_cast<int>(std::floor(t)), ja - 2));
        }
        const double w = t - j0;
        return (1.0 - w) * Kp.at(i, j0).m01 + w * Kp.at(i, j0 + 1).m01;
    }

    double k12_at(double x, double y, int side) const {
        const double t = x / h;
        if (t <= 0.0) return k12_level(0, y, side);
        if (t >= n) return k12_level(n, y, side);
        const int i = static_cast<int>(t);
        const double w = t - i;
        if (w < 1e-13) return k12_level(i, y, side);
        return (1.0 - w) * k12_level(i, y, side) + w * k12_level(i + 1, y, side);
    }

    template <typename Field>
    double entry_level(const Field& f, int i, int ea, int eb, double y) const {
        if (i == 0) return f.at(0, 0)(ea, eb);
        double t = y / h;
        if (t <= 0.0) return f.at(i, 0)(ea, eb);
        if (t >= i) return f.at(i, i)(ea, eb);
        const int j = static_cast<int>(t);
        const double w = t - j;
        return (1.0 - w) * f.at(i, j)(ea, eb) + w * f.at(i, j + 1)(ea, eb);
    }

    template <typename Field>
    double entry_at(const Field& f, int ea, int eb, double x, double y) const {
        const double t = x / h;
        if (t <= 0.0) return f.at(0, 0)(ea, eb);
        if (t >= n) return entry_level(f, n, ea, eb, y);
        const int i = static_cast<int>(t);
        const double w = t - i;
        if (w < 1e-13) return entry_level(f, i, ea, eb, y);
        return (1.0 - w) * entry_level(f, i, ea, eb, y) + w * entry_level(f, i + 1, ea, eb, y);
    }

    double suf_level(const TriScalar& s, int i, double y) const {
        if (i == 0) return 0.0;
        double t = y / h;
        if (t <= 0.0) return s.at(i, 0);
        if (t >= i) return 0.0;
        const int j = static_cast<int>(t);
        const double w = t - j;
        return (1.0 - w) * s.at(i, j) + w * s.at(i, j + 1);
    }

    double suf_at(int row, double x, double y) const {
        const TriScalar& s = row == 0 ? sufP0 : sufP1;
        const double t = x / h;
        if (t <= 0.0) return 0.0;
        if (t >= n) return suf_level(s, n, y);
        const int i = static_cast<int>(t);
        const double w = t - i;
        if (w < 1e-13) return suf_level(s, i, y);
        return (1.0 - w) * suf_level(s, i, y) + w * suf_level(s, i + 1, y);
    }

    double omega_at(double x) const { return interp_scalar(omega, x, h, n); }

    // col-2 suffix integrals of (K+L) per level, with the crossing cell of
    // the discontinuity line split at the line using one-sided k12 values.
    void build_col2_integrals(int i) {
        sufP0.at(i, i) = 0.0;
        sufP1.at(i, i) = 0.0;
        if (i == 0) return;
        const int ja = j_above(i);
        const double yc = c * i * h;
        const bool split = ja >= 1 && ja <= i && yc > (ja - 1) * h + 1e-14 && yc < ja * h - 1e-14;
        for (int j = i - 1; j >= 0; --j) {
            const double p0a = Kp.at(i, j).m01 + Lp.at(i, j).m01;
            const double p0b = Kp.at(i, j + 1).m01 + Lp.at(i, j + 1).m01;
            const double p1a = Kp.at(i, j).m11 + Lp.at(i, j).m11;
            const double p1b = Kp.at(i, j + 1).m11 + Lp.at(i, j + 1).m11;
            double cell_p0;
            if (split && j == ja - 1) {
                const double wl = yc - j * h, wr = (j + 1) * h - yc;
                const double l12c = (wr * Lp.at(i, j).m01 + wl * Lp.at(i, j + 1).m01) / h;
                const double kb = k12_level(i, yc, -1), ka = k12_level(i, yc, +1);
                cell_p0 = 0.5 * wl * (p0a + kb + l12c) + 0.5 * wr * (ka + l12c + p0b);
            } else {
                cell_p0 = 0.5 * h * (p0a + p0b);
            }
            sufP0.at(i, j) = sufP0.at(i, j + 1) + cell_p0;
            sufP1.at(i, j) = sufP1.at(i, j + 1) + 0.5 * h * (p1a + p1b);
        }
    }

    // Entry (ea, eb) of the kernel-PDE right-hand side
    //   (K+L) Lambda1 - Omega(x) G - F + int_y^x (K+L)(x,s) F ds,
    // with G = K for the K equation and G = L for the L one. side selects
    // the branch of k12 when the sample point sits near the line.
    double rhs(bool forK, int ea, int eb, double x, double y, int side) const {
        const int k = 1 - eb;
        double kl;
        if (ea == 0 && k == 1)
            kl = k12_at(x, y, side) + entry_at(Lp, 0, 1, x, y);
        else
            kl = entry_at(Kp, ea, k, x, y) + entry_at(Lp, ea, k, x, y);
        double v = kl * m.Lambda1(k, eb) - m.F(ea, eb);
        if (ea == 1) {
            double g0b;
            if (forK && eb == 1)
                g0b = k12_at(x, y, side);
            else
                g0b = forK ? entry_at(Kp, 0, eb, x, y) : entry_at(Lp, 0, eb, x, y);
            v -= omega_at(x) * g0b;
        }
        if (eb == 1) v += suf_at(ea, x, y) * m.F.m11;
        return v;
    }
};

Mat2 y0_boundary_value(const Mat2& L_row0, const Mat2& phi_x, const Mat2& scs, const Mat2& pbs) {
    return L_row0 * scs + phi_x * pbs;
}

// Integrates d(val)/dx = rhs(x, y(x), side) / sa from x0 to i*h with samples
// at every grid level the path crosses, plus a breakpoint where the path
// crosses the k12 discontinuity line (x_cross < 0: no crossing). Fractional
// segments use Simpson so their quadrature error stays smooth in the node
// index; full segments use trapezoid.
template <typename Rhs, typename Path>
double integrate_path(double val0, double x0, int i, double h, double sa, double x_cross,
                      double c_line, Rhs&& rhs, Path&& y_of) {
    const double x1 = i * h;
    if (x1 - x0 < 1e-14) return val0;

    double val = val0;
    double xa = x0;
    auto advance_to = [&](double xb) {
        if (xb - xa < 1e-13) return;
        const double xm = 0.5 * (xa + xb);
        const double ym = y_of(xm);
        const int side = (ym >= c_line * xm) ? +1 : -1;
        const double fa = rhs(xa, y_of(xa), side);
        const double fb = rhs(xb, y_of(xb), side);
        if (xb - xa < h - 1e-12) {
            const double fm = rhs(xm, ym, side);
            val += (xb - xa) / (6.0 * sa) * (fa + 4.0 * fm + fb);
        } else {
            val += 0.5 * (xb - xa) / sa * (fa + fb);
        }
        xa = xb;
    };
    const int m0 = static_cast<int>(std::floor(x0 / h + 1e-12)) + 1;
    for (int mm = m0; mm <= i; ++mm) {
        const double xb = mm * h;
        if (x_cross > xa + 1e-13 && x_cross < xb - 1e-13) advance_to(x_cross);
        advance_to(xb);
    }
    if (xa < x1 - 1e-13) advance_to(x1);
    return val;
}

struct PhiOdeTerms {
    std::vector<Mat2> G;      // int_0^x SigInv (K-L)(x,y) Lambda2 dy, per level
    std::vector<Mat2> Lrow0;  // L(x,0) per level
};

Mat2 phi_rhs(const SystemMatrices& m, const Mat2& SigInv, const Mat2& phi, double om,
             const Mat2& G, const Mat2& Lrow0) {
    const Mat2 Omega{0.0, 0.0, om, 0.0};
    return SigInv * phi * m.A - SigInv * m.Lambda2 + SigInv * phi * m.B2 * m.D -
           SigInv * Omega * phi + G + SigInv * Lrow0 * (m.Sigma * m.D);
}

// Classical RK4 on the grid; x-dependent coefficients interpolated linearly.
void integrate_phi(std::vector<Mat2>& phi, const SystemMatrices& m, const Mat2& phi0,
                   const std::vector<double>& omega, const PhiOdeTerms& terms, double h, int n) {
    const Mat2 SigInv = m.sigma_inv();
    phi[0] = phi0;
    for (int i = 0; i < n; ++i) {
        const double x = i * h;
        const double om_a = omega[i];
        const double om_m = interp_scalar(omega, x + 0.5 * h, h, n);
        const double om_b = omega[i + 1];
        const Mat2 G_a = terms.G[i];
        const Mat2 G_m = interp_nodes(terms.G, x + 0.5 * h, h, n);
        const Mat2 G_b = terms.G[i + 1];
        const Mat2 L_a = terms.Lrow0[i];
        const Mat2 L_m = interp_nodes(terms.Lrow0, x + 0.5 * h, h, n);
        const Mat2 L_b = terms.Lrow0[i + 1];

        const Mat2 k1 = phi_rhs(m, SigInv, phi[i], om_a, G_a, L_a);
        const Mat2 k2 = phi_rhs(m, SigInv, phi[i] + 0.5 * h * k1, om_m, G_m, L_m);
        const Mat2 k3 = phi_rhs(m, SigInv, phi[i] + 0.5 * h * k2, om_m, G_m, L_m);
        const Mat2 k4 = phi_rhs(m, SigInv, phi[i] + h * k3, om_b, G_b, L_b);
        phi[i + 1] = phi[i] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

}  // namespace

Mat2 l_diagonal_closed_form(const SystemMatrices& m) {
    const double s1 = m.sigma1(), s2 = m.sigma2();
    Mat2 d;
    d.m00 = -m.Lambda1.m00 / (2.0 * s1);
    d.m01 = -m.Lambda1.m01 / (s1 + s2);
    d.m10 = -m.Lambda1.m10 / (s1 + s2);
    d.m11 = -m.Lambda1.m11 / (2.0 * s2);
    return d;
}

double k12_diagonal_closed_form(const SystemMatrices& m) {
    return -m.Lambda1.m01 / (m.sigma1() - m.sigma2());
}

Mat2 design_phi0(const BeamParams& p, const ControllerParams& c) {
    const double kappa = 2.0 / (std::sqrt(p.epsilon) - p.theta);
    return {-p.xi - c.delta1 / kappa, 1.0,
            0.0, -c.delta2 * std::sqrt(p.mu)};
}

KernelSolution solve_kernels(const BeamParams& params, const ControllerParams& ctrl,
                             const SpatialGrid& grid, const SolverOptions& opt) {
    validate_params(params);
    validate_controller(ctrl);
    const SystemMatrices m = assemble_matrices(params);
    const int n = grid.n;
    const double h = grid.h;
    const double s1 = m.sigma1(), s2 = m.sigma2();
    const double c_line = s2 / s1;
    const Mat2 lDiag = l_diagonal_closed_form(m);
    const double k12Diag = k12_diagonal_closed_form(m);
    const Mat2 phi0 = design_phi0(params, ctrl);
    const Mat2 SigInv = m.sigma_inv();
    const Mat2 scs = m.Sigma * m.C * SigInv;
    const Mat2 pbs = (m.B1 + m.B2 * m.C) * SigInv;
    const double omega_cst = opt.omega21_alt_constant
                                 ? params.a / (2.0 * params.epsilon)
                                 : m.Lambda1.m10;

    KernelSolution sol;
    sol.n = n;
    sol.h = h;
    sol.params = params;
    sol.ctrl = ctrl;
    sol.K = TriangularField(n);
    sol.L = TriangularField(n);
    sol.phi.assign(n + 1, phi0);
    sol.omega21.assign(n + 1, omega_cst);

    TriangularField K_new(n), L_new(n);
    std::vector<Mat2> phi_new(n + 1);
    std::vector<double> omega_new(n + 1);
    const int total = (n + 1) * (n + 2) / 2;
    const double sig[2] = {s1, s2};

    double delta = 0.0;
    int iter = 0;
    for (iter = 1; iter <= opt.max_iter; ++iter) {
        SweepContext ctx(m, n, h, sol.K, sol.L, phi_new, sol.omega21);

        // (i) Phi ODE with couplings from the current kernel iterate.
        PhiOdeTerms terms;
        terms.G.assign(n + 1, Mat2::zero());
        terms.Lrow0 = ctx.Lrow0;
        for (int i = 0; i <= n; ++i)
            terms.G[i] = SigInv * Mat2{0.0, ctx.g0(i), 0.0, ctx.g1(i)} * m.Lambda2;
        integrate_phi(phi_new, m, phi0, sol.omega21, terms, h, n);

        // (ii) Characteristic update of K and L from boundary data plus path
        // integrals of the previous iterate's sources.
        for_each_flat(total, opt.policy, [&](int idx) {
            int i, j;
            unflatten(idx, i, j);
            const double x_i = i * h, y_j = j * h;

            Mat2 kv, lv;
            for (int ea = 0; ea < 2; ++ea) {
                for (int eb = 0; eb < 2; ++eb) {
                    const double sa = sig[ea], sb = sig[eb];

                    // L entry: enters through the diagonal, y decreasing.
                    {
                        const double slope = sb / sa;
                        const double x0 = (sa * y_j + sb * x_i) / (sa + sb);
                        // d(x) = y(x) - c x decreases; crossing when the node
                        // lies below the line (the diagonal is always above).
                        double xc = (y_j + slope * x_i) / (slope + c_line);
                        const double v = integrate_path(
                            lDiag(ea, eb), x0, i, h, sa, xc, c_line,
                            [&](double x, double y, int side) {
                                return ctx.rhs(false, ea, eb, x, y, side);
                            },
                            [&](double x) { return y_j + slope * (x_i - x); });
                        lv(ea, eb) = v;
                    }

                    // K entry: k12 above the line enters through the
                    // diagonal; every other characteristic exits through y=0.
                    {
                        const bool k12_diag_family =
                            (ea == 0 && eb == 1) && (s1 * y_j >= s2 * x_i - 1e-15);
                        const double slope = sb / sa;
                        double x0, val0, xc = -1.0;
                        if (k12_diag_family) {
                            x0 = (s1 * y_j - s2 * x_i) / (s1 - s2);
                            if (x0 < 0.0) x0 = 0.0;
                            val0 = k12Diag;
                            // parallel to the line: never crosses
                        } else {
                            x0 = x_i - (sa / sb) * y_j;
                            if (x0 < 0.0) x0 = 0.0;
                            const Mat2 Lb = cubic_nodes(ctx.Lrow0, x0, h, n);
                            const Mat2 ph = cubic_nodes(ctx.phi, x0, h, n);
                            val0 = y0_boundary_value(Lb, ph, scs, pbs)(ea, eb);
                            if (std::fabs(slope - c_line) > 1e-12)
                                xc = (slope * x_i - y_j) / (slope - c_line);
                        }
                        const double v = integrate_path(
                            val0, x0, i, h, sa, xc, c_line,
                            [&](double x, double y, int side) {
                                return ctx.rhs(true, ea, eb, x, y, side);
                            },
                            [&](double x) { return y_j - slope * (x_i - x); });
                        kv(ea, eb) = v;
                    }
                }
            }
            K_new.data[idx] = kv;
            L_new.data[idx] = lv;
        });

        // (iii) Absorption entry from the new diagonal trace of k21.
        for (int i = 0; i <= n; ++i)
            omega_new[i] = (s2 - s1) * K_new.at(i, i).m10 + omega_cst;

        delta = 0.0;
        for (int idx = 0; idx < total; ++idx) {
            delta = std::max(delta, (K_new.data[idx] - sol.K.data[idx]).max_abs());
            delta = std::max(delta, (L_new.data[idx] - sol.L.data[idx]).max_abs());
        }
        for (int i = 0; i <= n; ++i) {
            delta = std::max(delta, (phi_new[i] - sol.phi[i]).max_abs());
            delta = std::max(delta, std::fabs(omega_new[i] - sol.omega21[i]));
        }

        sol.K.data.swap(K_new.data);
        sol.L.data.swap(L_new.data);
        sol.phi.swap(phi_new);
        sol.omega21.swap(omega_new);

        if (delta < opt.tol) break;
    }
    sol.iterations = iter;
    sol.last_delta = delta;
    if (delta >= opt.tol)
        throw NonConvergence("kernel fixed-point iteration did not reach tol=" +
                                 std::to_string(opt.tol) + " after " +
                                 std::to_string(opt.max_iter) + " sweeps",
                             delta);
    return sol;
}

double ResidualReport::max_residual() const {
    return std::max({pde_K, pde_L, bc_diag_L, bc_diag_K, bc_y0, ode_phi, omega_consistency});
}

ResidualReport kernel_residuals(const KernelSolution& sol, const BeamParams& params,
                                const ControllerParams& ctrl, const SpatialGrid& grid) {
    if (sol.n != grid.n) throw GridMismatch("kernel solution grid does not match");
    const SystemMatrices m = assemble_matrices(params);
    const int n = grid.n;
    const double h = grid.h;
    const double s1 = m.sigma1(), s2 = m.sigma2();
    const Mat2 lDiag = l_diagonal_closed_form(m);
    const double k12Diag = k12_diagonal_closed_form(m);
    const Mat2 SigInv = m.sigma_inv();
    const Mat2 scs = m.Sigma * m.C * SigInv;
    const Mat2 pbs = (m.B1 + m.B2 * m.C) * SigInv;

    SweepContext ctx(m, n, h, sol.K, sol.L, sol.phi, sol.omega21);
    ResidualReport rep;

    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= i; ++j) {
            rep.sup_K = std::max(rep.sup_K, sol.K.at(i, j).max_abs());
            rep.sup_L = std::max(rep.sup_L, sol.L.at(i, j).max_abs());
        }
    }

    // PDE residuals with central differences at interior nodes. Nodes whose
    // stencil reaches across the k12 discontinuity line are excluded; the
    // kernels are only piecewise smooth there.
    const double band = 1.5 * (s1 + s2) * h;
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j < i; ++j) {
            const double x_i = i * h, y_j = j * h;
            if (std::fabs(s1 * y_j - s2 * x_i) <= band) {
                ++rep.excluded_nodes;
                continue;
            }
            const int side = (s1 * y_j >= s2 * x_i) ? +1 : -1;
            const Mat2 Kx = (1.0 / (2.0 * h)) * (sol.K.at(i + 1, j) - sol.K.at(i - 1, j));
            const Mat2 Ky = (1.0 / (2.0 * h)) * (sol.K.at(i, j + 1) - sol.K.at(i, j - 1));
            const Mat2 Lx = (1.0 / (2.0 * h)) * (sol.L.at(i + 1, j) - sol.L.at(i - 1, j));
            const Mat2 Ly = (1.0 / (2.0 * h)) * (sol.L.at(i, j + 1) - sol.L.at(i, j - 1));
            Mat2 rhsK, rhsL;
            for (int ea = 0; ea < 2; ++ea)
                for (int eb = 0; eb < 2; ++eb) {
                    rhsK(ea, eb) = ctx.rhs(true, ea, eb, x_i, y_j, side);
                    rhsL(ea, eb) = ctx.rhs(false, ea, eb, x_i, y_j, side);
                }
            const Mat2 resK = m.Sigma * Kx + Ky * m.Sigma - rhsK;
            const Mat2 resL = m.Sigma * Lx - Ly * m.Sigma - rhsL;
            rep.pde_K = std::max(rep.pde_K, resK.max_abs());
            rep.pde_L = std::max(rep.pde_L, resL.max_abs());
        }
    }

    // Boundary conditions, reported in kernel-value scale.
    for (int i = 0; i <= n; ++i) {
        rep.bc_diag_L = std::max(rep.bc_diag_L, (sol.L.at(i, i) - lDiag).max_abs());
        rep.bc_diag_K = std::max(rep.bc_diag_K, std::fabs(sol.K.at(i, i).m01 - k12Diag));
        rep.omega_consistency =
            std::max(rep.omega_consistency,
                     std::fabs(sol.omega21[i] -
                               ((s2 - s1) * sol.K.at(i, i).m10 + m.Lambda1.m10)));
        const Mat2 bc = y0_boundary_value(sol.L.at(i, 0), sol.phi[i], scs, pbs);
        Mat2 diff = sol.K.at(i, 0) - bc;
        // The k12 families meet at the origin; the (1,2) corner value belongs
        // to the diagonal datum, not the y=0 condition.
        if (i == 0) diff.m01 = 0.0;
        rep.bc_y0 = std::max(rep.bc_y0, diff.max_abs());
    }

    for (const Mat2& v : sol.phi) rep.sup_phi = std::max(rep.sup_phi, v.max_abs());

    // Phi ODE residual by central differences.
    {
        PhiOdeTerms terms;
        terms.G.assign(n + 1, Mat2::zero());
        terms.Lrow0 = ctx.Lrow0;
        for (int i = 0; i <= n; ++i)
            terms.G[i] = SigInv * Mat2{0.0, ctx.g0(i), 0.0, ctx.g1(i)} * m.Lambda2;
        for (int i = 1; i < n; ++i) {
            const Mat2 dphi = (1.0 / (2.0 * h)) * (sol.phi[i + 1] - sol.phi[i - 1]);
            const Mat2 f = phi_rhs(m, SigInv, sol.phi[i], sol.omega21[i], terms.G[i],
                                   terms.Lrow0[i]);
            rep.ode_phi = std::max(rep.ode_phi, (dphi - f).max_abs());
        }
        // Phi(0) is assigned, not solved; still check it.
        rep.ode_phi = std::max(rep.ode_phi,
                               (sol.phi[0] - design_phi0(params, ctrl)).max_abs());
    }

    // Report in units relative to the solution size; the kernels grow like
    // exp(Mx) and their raw residual scales with them.
    const double scale = 1.0 + std::max(rep.sup_K, rep.sup_L);
    rep.pde_K /= scale;
    rep.pde_L /= scale;
    rep.bc_diag_L /= scale;
    rep.bc_diag_K /= scale;
    rep.bc_y0 /= scale;
    rep.omega_consistency /= scale;
    rep.ode_phi /= 1.0 + rep.sup_phi;

    return rep;
}

RowJumpInfo row_jump_info(const KernelSolution& sol, int i) {
    const double h = sol.h;
    const SystemMatrices m = assemble_matrices(sol.params);
    const double s1 = m.sigma1(), s2 = m.sigma2();

    RowJumpInfo info;
    info.y_star = (s2 / s1) * i * h;
    int hi = 0;
    while (hi <= i && s1 * (hi * h) < s2 * (i * h) - 1e-15) ++hi;
    const int lo = hi - 1;
    if (lo < 1 || hi + 1 > i) return info;  // too short to straddle

    auto extrap = [&](int j0, int j1) {
        const double w = (info.y_star - j0 * h) / ((j1 - j0) * h);
        return (1.0 - w) * sol.K.at(i, j0) + w * sol.K.at(i, j1);
    };
    info.lo = lo;
    info.hi = hi;
    info.K_below = extrap(lo - 1, lo);
    info.K_above = extrap(hi, hi + 1);
    return info;
}

GainSet extract_gains(const KernelSolution& sol, const SpatialGrid& grid) {
    if (sol.n != grid.n) throw GridMismatch("kernel solution grid does not match");
    const int n = grid.n;
    const double h = grid.h;
    const SystemMatrices m = assemble_matrices(sol.params);
    const double s1 = m.sigma1(), s2 = m.sigma2();

    GainSet g;
    g.n = n;
    g.h = h;
    g.K1.resize(n + 1);
    g.L1.resize(n + 1);
    g.K1y.assign(n + 1, Mat2::zero());
    g.L1y.assign(n + 1, Mat2::zero());
    for (int j = 0; j <= n; ++j) {
        g.K1[j] = sol.K.at(n, j);
        g.L1[j] = sol.L.at(n, j);
    }
    g.phi1 = sol.phi[n];

    // Characteristic separatrix of the k12 families at x = 1.
    g.y_star = s2 / s1;
    g.jump_hi = 0;
    while (g.jump_hi <= n && s1 * (g.jump_hi * h) < s2 - 1e-15) ++g.jump_hi;
    g.jump_lo = g.jump_hi - 1;

    auto extrap = [&](const std::vector<Mat2>& row, int j0, int j1, double y) {
        const double w = (y - j0 * h) / ((j1 - j0) * h);
        return (1.0 - w) * row[j0] + w * row[j1];
    };
    if (g.jump_lo >= 1 && g.jump_hi + 1 <= n) {
        g.K_below = extrap(g.K1, g.jump_lo - 1, g.jump_lo, g.y_star);
        g.K_above = extrap(g.K1, g.jump_hi, g.jump_hi + 1, g.y_star);
        g.L_below = extrap(g.L1, g.jump_lo - 1, g.jump_lo, g.y_star);
        g.L_above = extrap(g.L1, g.jump_hi, g.jump_hi + 1, g.y_star);
    } else {
        g.jump_lo = g.jump_hi = -1;  // separatrix outside (0,1): nothing to split
    }

    // Adjacent-difference outlier test on the k12 row.
    {
        std::vector<double> diffs(n);
        for (int j = 0; j < n; ++j) diffs[j] = std::fabs(g.K1[j + 1].m01 - g.K1[j].m01);
        std::vector<double> sorted = diffs;
        std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
        const double median = sorted[n / 2];
        int arg = 0;
        for (int j = 1; j < n; ++j)
            if (diffs[j] > diffs[arg]) arg = j;
        g.detected_jump_median = median;
        g.detected_jump_size = diffs[arg];
        g.detected_jump_index = diffs[arg] > 5.0 * median ? arg : -1;
    }

    // y-derivative rows. One-sided stencils at the ends and on each side of
    // the separatrix so no stencil differences across the jump.
    auto fill_dy = [&](const std::vector<Mat2>& row, std::vector<Mat2>& out) {
        auto fwd = [&](int j) {
            if (j + 2 > n) return (1.0 / h) * (row[j + 1] - row[j]);
            return (1.0 / (2.0 * h)) * (-3.0 * row[j] + 4.0 * row[j + 1] - row[j + 2]);
        };
        auto bwd = [&](int j) {
            if (j - 2 < 0) return (1.0 / h) * (row[j] - row[j - 1]);
            return (1.0 / (2.0 * h)) * (3.0 * row[j] - 4.0 * row[j - 1] + row[j - 2]);
        };
        for (int j = 0; j <= n; ++j) {
            const bool at_lo = g.jump_lo >= 0 && j == g.jump_lo;
            const bool at_hi = g.jump_hi >= 0 && j == g.jump_hi;
            if (j == 0 || (at_hi && j < n)) {
                out[j] = fwd(j);
            } else if (j == n || at_lo) {
                out[j] = bwd(j);
            } else {
                out[j] = (1.0 / (2.0 * h)) * (row[j + 1] - row[j - 1]);
            }
        }
    };
    fill_dy(g.K1, g.K1y);
    fill_dy(g.L1, g.L1y);
    return g;
}

}  // namespace tbeam
