#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace tbeam;
using namespace tbeam::test;

TEST_CASE("energy of the zero state is zero") {
    const SpatialGrid grid(64);
    CHECK(energy_h1(PhysicalState::zero(grid), grid) == 0.0);
}

TEST_CASE("energy of u = x matches the analytic value 4/3") {
    const SpatialGrid grid(200);
    PhysicalState ps = PhysicalState::zero(grid);
    for (int i = 0; i <= grid.n; ++i) ps.u[i] = grid.node(i);
    CHECK(energy_h1(ps, grid) == doctest::Approx(4.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("energy refines at second order on the reference data") {
    double e100, e200, e400;
    {
        const SpatialGrid g(100);
        e100 = energy_h1(default_initial_state(g), g);
    }
    {
        const SpatialGrid g(200);
        e200 = energy_h1(default_initial_state(g), g);
    }
    {
        const SpatialGrid g(400);
        e400 = energy_h1(default_initial_state(g), g);
    }
    CHECK(e400 > 0.0);
    const double d1 = std::fabs(e100 - e400), d2 = std::fabs(e200 - e400);
    CHECK(d1 < 1e-3 * e400);
    CHECK(d2 < d1);  // refinement improves the quadrature
}

TEST_CASE("energy and lyapunov are quadratic forms") {
    const SpatialGrid grid(96);
    std::mt19937 rng(42);
    const PhysicalState ps = smooth_state(grid, rng);
    PhysicalState scaled = ps;
    const double c = 3.7;
    for (int i = 0; i <= grid.n; ++i) {
        scaled.u[i] *= c;
        scaled.alpha[i] *= c;
        scaled.ut[i] *= c;
        scaled.alphat[i] *= c;
    }
    CHECK(energy_h1(scaled, grid) ==
          doctest::Approx(c * c * energy_h1(ps, grid)).epsilon(1e-12));

    const SystemMatrices m = assemble_matrices(ref_params());
    TargetState ts = TargetState::zero(grid);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i <= grid.n; ++i) {
        ts.sigma[i] = {u(rng), u(rng)};
        ts.psi[i] = {u(rng), u(rng)};
    }
    ts.X = {u(rng), u(rng)};
    TargetState ts2 = ts;
    for (int i = 0; i <= grid.n; ++i) {
        ts2.sigma[i] *= c;
        ts2.psi[i] *= c;
    }
    ts2.X *= c;
    const LyapunovConfig cfg{2.0, 1.5};
    CHECK(lyapunov_v(ts2, m, cfg, grid) ==
          doctest::Approx(c * c * lyapunov_v(ts, m, cfg, grid)).epsilon(1e-12));
}

TEST_CASE("lyapunov value of pure ODE state is X'X") {
    const SpatialGrid grid(64);
    const SystemMatrices m = assemble_matrices(ref_params());
    TargetState ts = TargetState::zero(grid);
    ts.X = {1.0, 0.0};
    CHECK(lyapunov_v(ts, m, {1.0, 1.0}, grid) == doctest::Approx(1.0));
    ts.X = {0.0, 0.0};
    CHECK(lyapunov_v(ts, m, {3.0, 2.0}, grid) == 0.0);
}

TEST_CASE("decay fit recovers an exact exponential") {
    std::vector<double> t, e;
    for (int k = 0; k <= 400; ++k) {
        t.push_back(0.01 * k);
        e.push_back(std::exp(-3.0 * t.back()));
    }
    const DecayReport rep = fit_decay_rate(t, e, {0.5, 4.0});
    CHECK(rep.rate == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(rep.fit_residual < 1e-10);
}

TEST_CASE("decay fit rejects bad inputs") {
    std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> e(t.size(), 1.0);
    e[5] = 0.0;
    CHECK_THROWS_AS(fit_decay_rate(t, e, {0.0, 10.0}), NonPositiveEnergy);

    std::vector<double> shortt{0, 1, 2};
    std::vector<double> shorte{1, 1, 1};
    CHECK_THROWS_AS(fit_decay_rate(shortt, shorte, {0.0, 10.0}), std::invalid_argument);
}

TEST_CASE("open-loop growth fits to a negative rate") {
    const SpatialGrid grid(80);
    SimConfig cfg;
    cfg.t_final = 6.0;
    cfg.mode = SimMode::open_loop;
    const TimeSeries ts = simulate(default_initial_state(grid), ref_params(), ref_ctrl(), cfg, nullptr);
    const DecayReport rep = fit_decay_rate(ts, default_fit_window(ref_params(), 6.0));
    CHECK(rep.rate < 0.0);
}

TEST_CASE("theorem constant on the reference parameters") {
    CHECK(theorem_constant_c2(ref_params(), ref_ctrl()) == doctest::Approx(-1.0));
    CHECK(theorem_constant_c2(ref_params(), {10.0, 10.0}) == doctest::Approx(7.0));
    // depends on the rates only through the minimum
    CHECK(theorem_constant_c2(ref_params(), {3.0, 9.0}) ==
          theorem_constant_c2(ref_params(), {9.0, 3.0}));
}

TEST_CASE("default fit window starts past the transport transient") {
    const FitWindow w = default_fit_window(ref_params(), 20.0);
    CHECK(w.t0 == doctest::Approx(std::sqrt(2.0) + 0.5));
    CHECK(w.t1 == 20.0);
}

TEST_CASE("decay report formats as a flat key=value block") {
    DecayReport rep;
    rep.rate = 4.0;
    rep.t0 = 1.9;
    rep.t1 = 20.0;
    rep.samples = 100;
    rep.c2 = -1.0;
    const std::string s = format_decay_report(rep);
    CHECK(s.find("rate=4") != std::string::npos);
    CHECK(s.find("c2=-1") != std::string::npos);
    CHECK(s.find("samples=100") != std::string::npos);
}

TEST_CASE("default lyapunov weights are positive and bounded") {
    const int n = 100;
    const SpatialGrid grid(n);
    const SystemMatrices m = assemble_matrices(ref_params());
    const KernelSolution sol = solve_kernels(ref_params(), ref_ctrl(), grid);
    const XiKernels xi = xi_kernels(sol, m, grid);
    const LyapunovConfig cfg = default_lyapunov_config(m, sol, xi, ref_params(), ref_ctrl());
    CHECK(cfg.zeta > 0.0);
    CHECK(cfg.delta > 0.0);
    CHECK(cfg.delta <= 6.0);  // capped against boundary-residue amplification
}
