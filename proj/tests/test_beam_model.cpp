#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tbeam/beam_model.hpp"

using namespace tbeam;

namespace {

BeamParams paper_params() { return {1.0, 2.0, 1.0, -1.0, 1.0}; }

BeamParams random_valid(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BeamParams p;
    p.epsilon = 0.3 + 2.7 * u(rng);
    p.mu = p.epsilon * (1.1 + 2.0 * u(rng));
    p.a = -2.0 + 4.0 * u(rng);
    p.theta = std::sqrt(p.epsilon) + (0.3 + 3.0 * u(rng)) * (u(rng) < 0.5 ? -1.0 : 1.0);
    p.xi = -2.0 + 4.0 * u(rng);
    return p;
}

}  // namespace

TEST_CASE("paper parameter set is accepted") {
    const BeamParams p = validate_params(paper_params());
    CHECK(p.epsilon == 1.0);
    CHECK(p.theta == -1.0);
}

TEST_CASE("theta equal to sqrt(epsilon) is rejected") {
    BeamParams p = paper_params();
    p.theta = 1.0;
    p.xi = 0.0;
    CHECK_THROWS_AS(validate_params(p), IllPosedAntiDamping);
    p.theta = 1.0 + 1e-12;
    CHECK_THROWS_AS(validate_params(p), IllPosedAntiDamping);
}

TEST_CASE("non-positive coefficients are rejected") {
    BeamParams p = paper_params();
    p.epsilon = 0.0;
    CHECK_THROWS_AS(validate_params(p), NonPositiveCoefficient);
    p = paper_params();
    p.mu = -1.0;
    CHECK_THROWS_AS(validate_params(p), NonPositiveCoefficient);
}

TEST_CASE("reversed wave speeds are rejected") {
    BeamParams p{2.0, 1.0, 1.0, 0.0, 0.0};
    CHECK_THROWS_AS(validate_params(p), UnsupportedSpeedOrdering);
    p = {1.0, 1.0, 1.0, 0.0, 0.0};  // equal speeds excluded as well
    CHECK_THROWS_AS(validate_params(p), UnsupportedSpeedOrdering);
}

TEST_CASE("a = 0 decoupled rotation is allowed") {
    BeamParams p = paper_params();
    p.a = 0.0;
    CHECK_NOTHROW(validate_params(p));
}

TEST_CASE("matrix assembly on the paper parameters") {
    const SystemMatrices m = assemble_matrices(paper_params());
    const double s2 = 1.0 / std::sqrt(2.0);

    CHECK(m.Sigma.m00 == doctest::Approx(1.0));
    CHECK(m.Sigma.m11 == doctest::Approx(s2).epsilon(1e-12));
    CHECK(m.Sigma.m01 == 0.0);
    CHECK(m.Sigma.m10 == 0.0);

    CHECK(m.Lambda1.m00 == 0.0);
    CHECK(m.Lambda1.m01 == doctest::Approx(-0.5));
    CHECK(m.Lambda1.m10 == doctest::Approx(0.35355339059327373).epsilon(1e-12));
    CHECK(m.Lambda1.m11 == 0.0);

    // sqrt(eps) + theta = 0 for this set, so C has a single -1 entry.
    CHECK(m.C.m00 == doctest::Approx(0.0));
    CHECK(m.C.m11 == doctest::Approx(-1.0));
    CHECK(m.kappa == doctest::Approx(1.0));

    CHECK(m.Lambda2.m11 == doctest::Approx(-s2).epsilon(1e-12));
    CHECK(m.F.m11 == doctest::Approx(-0.5 * s2).epsilon(1e-12));
    CHECK(m.A.m00 == doctest::Approx(1.0));
    CHECK(m.A.m01 == doctest::Approx(-1.0));
    CHECK(m.D.m00 == doctest::Approx(-1.0));
    CHECK(m.D.m01 == doctest::Approx(1.0));
}

TEST_CASE("D = -sqrt(eps) A for random admissible parameters") {
    // The printed closed forms satisfy D = -sqrt(eps) A identically (the
    // claimed D = -A/sqrt(eps) only coincides at eps = 1).
    std::mt19937 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const BeamParams p = validate_params(random_valid(rng));
        const SystemMatrices m = assemble_matrices(p);
        const Mat2 res = m.D + std::sqrt(p.epsilon) * m.A;
        CHECK(res.max_abs() < 1e-12);
    }
}

TEST_CASE("Sigma is strictly decreasing along the diagonal") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const SystemMatrices m = assemble_matrices(validate_params(random_valid(rng)));
        CHECK(m.Sigma.m00 > m.Sigma.m11);
    }
}

TEST_CASE("assembly is deterministic") {
    std::mt19937 rng(17);
    const BeamParams p = validate_params(random_valid(rng));
    const SystemMatrices m1 = assemble_matrices(p);
    const SystemMatrices m2 = assemble_matrices(p);
    CHECK((m1.Sigma - m2.Sigma).max_abs() == 0.0);
    CHECK((m1.Lambda1 - m2.Lambda1).max_abs() == 0.0);
    CHECK((m1.D - m2.D).max_abs() == 0.0);
    CHECK(m1.kappa == m2.kappa);
}

TEST_CASE("grid rejects too few cells") {
    CHECK_THROWS_AS(SpatialGrid(4), std::invalid_argument);
    CHECK_NOTHROW(SpatialGrid(8));
}
