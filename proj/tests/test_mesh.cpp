#include <catch_amalgamated.hpp>

#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/mesh.hpp"

using namespace subdiff;
using Catch::Approx;

TEST_CASE("graded mesh r=2 N=2 matches direct substitution")
{
    const TemporalMesh m = build_temporal(1.0, 1, 2, 2.0);
    REQUIRE(m.first_level() == -4);
    REQUIRE(m.last_level() == 4);
    CHECK(m.t(0) == 0.0);
    CHECK(m.t(1) == Approx(0.125).epsilon(1e-15));
    CHECK(m.t(2) == Approx(0.5).epsilon(1e-15));
    CHECK(m.t(3) == Approx(0.875).epsilon(1e-15));
    CHECK(m.t(4) == 1.0);
    CHECK(m.t(-4) == -1.0);
    CHECK(m.t(-3) == Approx(-0.875).epsilon(1e-15));
    CHECK(m.t(-1) == Approx(-0.125).epsilon(1e-15));
}

TEST_CASE("uniform meshes")
{
    const TemporalMesh m = build_temporal(1.0, 1, 4, 1.0);
    for (int n = 0; n <= 8; ++n)
        CHECK(m.t(n) == Approx(0.125 * n).margin(1e-15));

    const TemporalMesh big = build_temporal(1.0, 3, 200, 1.0);
    REQUIRE(big.last_level() == 1200);
    for (int n = big.first_level() + 1; n <= big.last_level(); ++n)
        REQUIRE(std::abs(big.step(n) - 1.0 / 400) <= 1e-13);
    CHECK(big.t(1200) == 3.0);
}

TEST_CASE("window endpoints, monotonicity and mirror symmetry")
{
    for (double r : {1.0, 4.0 / 3.0, 2.0, 3.0}) {
        const int N = 37, K = 3;
        const double tau = 0.7;
        const TemporalMesh m = build_temporal(tau, K, N, r);
        CHECK(m.points().size() == static_cast<std::size_t>(2 * (K + 1) * N + 1));
        for (int i = -1; i <= K; ++i)
            CHECK(std::abs(m.t(2 * i * N) - i * tau) <= 1e-13 * std::max(1.0, std::abs(i * tau)));
        for (int n = m.first_level() + 1; n <= m.last_level(); ++n)
            REQUIRE(m.t(n) > m.t(n - 1));
        for (int i = 0; i <= K; ++i) {
            const double left = (i - 1) * tau;
            for (int j = 0; j <= 2 * N; ++j) {
                const double a = m.t(2 * (i - 1) * N + j) - left;
                const double b = tau - (m.t(2 * i * N - j) - left);
                REQUIRE(std::abs(a - b) <= 1e-13);
            }
        }
    }
}

TEST_CASE("doubling N nests the coarse mesh exactly")
{
    for (double r : {1.0, 5.0 / 3.0, 3.0}) {
        const TemporalMesh c = build_temporal(1.0, 3, 50, r);
        const TemporalMesh f = build_temporal(1.0, 3, 100, r);
        for (int n = c.first_level(); n <= c.last_level(); ++n)
            REQUIRE(std::abs(f.t(2 * n) - c.t(n)) <= 1e-13);
    }
}

TEST_CASE("first step scales like N^-r and steps obey the grading bound")
{
    const double r = 2.5;
    double C = 0.0;
    for (int N : {16, 32, 64, 128}) {
        const TemporalMesh m = build_temporal(1.0, 2, N, r);
        const double rho1 = m.step(1);
        CHECK(rho1 == Approx(0.5 * std::pow(1.0 / N, r)).epsilon(1e-12));
        double worst = 0.0;
        for (int i = 1; i <= 2; ++i)
            for (int n = 2 * (i - 1) * N + 1; n <= 2 * i * N; ++n) {
                const double s = m.t(n) - (i - 1);
                worst = std::max(worst, m.step(n) / (std::pow(rho1, 1.0 / r) * std::pow(s, 1.0 - 1.0 / r)));
            }
        if (C == 0.0)
            C = worst * 1.1;
        CHECK(worst <= C);
    }
}

TEST_CASE("spatial mesh")
{
    const SpatialMesh s = build_spatial(1.0, 4);
    REQUIRE(s.nodes.size() == 5);
    CHECK(s.nodes[1] == 0.25);
    CHECK(s.nodes[3] == 0.75);
    CHECK(s.nodes[4] == 1.0);
    CHECK(build_spatial(1.0, 2).interior() == 1);
    CHECK(build_spatial(2.0, 8).h == 0.25);
}

TEST_CASE("mesh parameter validation")
{
    CHECK_THROWS_AS(build_temporal(1.0, 1, 1, 1.0), ValidationError);
    CHECK_THROWS_AS(build_temporal(1.0, 1, 4, 0.9), ValidationError);
    CHECK_THROWS_AS(build_temporal(0.0, 1, 4, 1.0), ValidationError);
    CHECK_THROWS_AS(build_temporal(1.0, 0, 4, 1.0), ValidationError);
    CHECK_THROWS_AS(build_spatial(1.0, 1), ValidationError);
    CHECK_THROWS_AS(build_spatial(-1.0, 4), ValidationError);
}

TEST_CASE("gaps come from the grading formula")
{
    const TemporalMesh m = build_temporal(1.0, 3, 64, 3.0);
    const double rho1 = 0.5 * std::pow(1.0 / 64, 3.0);
    // first step of the last window, far below the spacing of doubles near t = 2
    CHECK(m.step(2 * 2 * 64 + 1) == Approx(rho1).epsilon(1e-14));
    CHECK(m.step(1) == Approx(rho1).epsilon(1e-14));
    for (int n : {5, 64, 100, 128, 300, 384})
        for (int k : {0, 1, 63, 64, 65, 127, 129, 250}) {
            if (k > n)
                continue;
            CHECK(m.gap(n, k) == Approx(m.t(n) - m.t(k)).margin(1e-14));
        }
    double sum = 0.0;
    for (int n = 129; n <= 256; ++n)
        sum += m.step(n);
    CHECK(sum == Approx(1.0).epsilon(1e-14));
    const TemporalMesh u = build_temporal(1.0, 3, 50, 1.0);
    for (int n = -99; n <= 300; ++n)
        CHECK(u.step(n) == Approx(0.01).epsilon(1e-14));
}
