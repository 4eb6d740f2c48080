#include "tbeam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tbeam {

namespace {

double trapz_sq(const std::vector<double>& f, double h) {
    double acc = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i)
        acc += 0.5 * h * (f[i - 1] * f[i - 1] + f[i] * f[i]);
    return acc;
}

std::vector<double> derivative(const std::vector<double>& f, double h) {
    const int m = static_cast<int>(f.size()) - 1;
    std::vector<double> d(f.size());
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i < m; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
    return d;
}

}  // namespace

double energy_h1(const PhysicalState& ps, const SpatialGrid& grid) {
    if (ps.u.size() != static_cast<std::size_t>(grid.size()))
        throw GridMismatch("energy_h1: state length mismatch");
    const auto ux = derivative(ps.u, grid.h);
    const auto ax = derivative(ps.alpha, grid.h);
    return trapz_sq(ps.u, grid.h) + trapz_sq(ux, grid.h) + trapz_sq(ps.alpha, grid.h) +
           trapz_sq(ax, grid.h) + trapz_sq(ps.ut, grid.h) + trapz_sq(ps.alphat, grid.h);
}

double lyapunov_v(const TargetState& ts, const SystemMatrices& mats, const LyapunovConfig& cfg,
                  const SpatialGrid& grid) {
    if (ts.sigma.size() != static_cast<std::size_t>(grid.size()))
        throw GridMismatch("lyapunov_v: state length mismatch");
    const Mat2 SigInv = mats.sigma_inv();
    double acc = dot(ts.X, ts.X);
    double is = 0.0, ip = 0.0;
    for (int i = 0; i <= grid.n; ++i) {
        const double x = grid.node(i);
        const double w = (i == 0 || i == grid.n) ? 0.5 * grid.h : grid.h;
        is += w * std::exp(cfg.delta * x) * dot(ts.sigma[i], SigInv * ts.sigma[i]);
        ip += w * std::exp(-cfg.delta * x) * dot(ts.psi[i], SigInv * ts.psi[i]);
    }
    return acc + cfg.zeta * is + ip;
}

LyapunovConfig default_lyapunov_config(const SystemMatrices& mats, const KernelSolution& kernels,
                                       const XiKernels& xi, const BeamParams& params,
                                       const ControllerParams& ctrl) {
    const Mat2 SigInv = mats.sigma_inv();
    const Mat2 phi0 = design_phi0(params, ctrl);
    const TargetMatrices tm = target_matrices(mats, phi0);

    const double m1 = std::max(mats.kappa * mats.kappa, 1.0 / params.mu) + 1.0;
    const double m2 = std::pow((tm.E2 + tm.E3.transpose() * mats.C).norm2(), 2) +
                      std::pow(mats.C.norm2(), 2);
    const double m3 = std::pow(mats.Lambda1.norm2(), 2);

    double m4 = 0.0, m5 = 0.0, m6max = 0.0, omega_max = 0.0;
    for (std::size_t i = 0; i < xi.Xi1.size(); ++i)
        m4 = std::max(m4, std::pow((SigInv * xi.Xi1[i]).norm2(), 2));
    for (const Mat2& v : xi.Xi2.data) m5 = std::max(m5, std::pow(v.norm2(), 2));
    for (const Mat2& v : xi.Xi3.data) m6max = std::max(m6max, std::pow(v.norm2(), 2));
    const double m6 = 1.0 + m6max;
    for (double w : kernels.omega21) omega_max = std::max(omega_max, std::fabs(w));

    double cprime = std::min(ctrl.delta1, ctrl.delta2) - 2.0 - (m1 - 1.0);
    if (cprime <= 0.0) cprime = 0.5;

    const double sig_inv_norm = SigInv.norm2();
    LyapunovConfig cfg;
    cfg.delta = 1.05 * std::max(2.0 * mats.Lambda1.norm2() + m6 +
                                    sig_inv_norm * (cprime + 1.0 + 2.0 * m4),
                                sig_inv_norm * (1.0 + 2.0 * omega_max));
    // The e^{delta x} weight multiplies the O(h) residue of the discrete
    // sigma(1) = 0 enforcement by e^{delta}; past ~e^6 that residue swamps
    // the functional's decay on moderate grids and the monitor stops being
    // useful.
    cfg.delta = std::min(cfg.delta, 6.0);
    cfg.zeta = 1.05 * std::max(m3 + m5, m2);
    return cfg;
}

FitWindow default_fit_window(const BeamParams& params, double t_final) {
    return {std::sqrt(params.mu) + 0.5, t_final};
}

DecayReport fit_decay_rate(const std::vector<double>& times, const std::vector<double>& energies,
                           FitWindow window) {
    if (times.size() != energies.size())
        throw GridMismatch("fit_decay_rate: time/energy length mismatch");

    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.t0 || times[i] > window.t1) continue;
        if (energies[i] <= 0.0)
            throw NonPositiveEnergy("non-positive energy at t=" + std::to_string(times[i]));
        ts.push_back(times[i]);
        ls.push_back(std::log(energies[i]));
    }
    if (ts.size() < 10)
        throw std::invalid_argument("fit window holds fewer than 10 samples");

    const double m = static_cast<double>(ts.size());
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += ls[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * ls[i];
    }
    const double slope = (m * stl - st * sl) / (m * stt - st * st);
    const double intercept = (sl - slope * st) / m;

    double rss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double e = ls[i] - (intercept + slope * ts[i]);
        rss += e * e;
    }

    DecayReport rep;
    rep.rate = -slope;
    rep.fit_residual = std::sqrt(rss / m);
    rep.t0 = window.t0;
    rep.t1 = window.t1;
    rep.samples = static_cast<int>(ts.size());
    return rep;
}

DecayReport fit_decay_rate(const TimeSeries& series, FitWindow window) {
    return fit_decay_rate(series.times, series.energy, window);
}

double theorem_constant_c2(const BeamParams& params, const ControllerParams& ctrl) {
    const double se = std::sqrt(params.epsilon);
    return std::min(ctrl.delta1, ctrl.delta2) - 2.0 -
           std::max(4.0 / ((se - params.theta) * (se - params.theta)), 1.0 / params.mu);
}

std::string format_decay_report(const DecayReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "rate=" << rep.rate << "\n"
       << "fit_residual=" << rep.fit_residual << "\n"
       << "window_t0=" << rep.t0 << "\n"
       << "window_t1=" << rep.t1 << "\n"
       << "samples=" << rep.samples << "\n"
       << "c2=" << rep.c2 << "\n";
    return os.str();
}

}  // namespace tbeam
