#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ringtrio/dynamics.hpp"

using namespace ringtrio;

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("energy is conserved to 1e-9 over t = 3700 at eps = 7") {
    const PhasePoint z0{0, 0, std::sqrt(20.0), std::sqrt(8.0)};
    REQUIRE(energy(z0) == doctest::Approx(7.0).epsilon(1e-14));
    const Trajectory traj = integrate(z0, 3700.0, 5.0);
    CHECK(traj.max_energy_drift < 1e-9);
    CHECK(traj.samples.size() == 741);
    CHECK(traj.samples.back().t == doctest::Approx(3700.0));
}

TEST_CASE("flow is reversible") {
    const PhasePoint z0{0.1, -0.2, 1.0, 2.0};
    const PhasePoint z1 = flow(z0, 50.0);
    PhasePoint back = z1;
    back.px = -back.px;
    back.py = -back.py;
    const PhasePoint z2 = flow(back, 50.0);
    CHECK(z2.x == doctest::Approx(z0.x).epsilon(1e-9).scale(1.0));
    CHECK(z2.y == doctest::Approx(z0.y).epsilon(1e-9).scale(1.0));
    CHECK(z2.px == doctest::Approx(-z0.px).epsilon(1e-9).scale(1.0));
    CHECK(z2.py == doctest::Approx(-z0.py).epsilon(1e-9).scale(1.0));
}

TEST_CASE("equations of motion carry effective mass 2") {
    HamiltonianFlow f;
    OdeState<4> z{0.2, 0.1, 0.6, -0.4}, dz{};
    f(0, z, dz);
    CHECK((double)dz[0] == doctest::Approx(0.3));
    CHECK((double)dz[1] == doctest::Approx(-0.2));
    const Vec2 g = grad_potential(0.2, 0.1);
    CHECK((double)dz[2] == doctest::Approx(-g.x()).epsilon(1e-14));
    CHECK((double)dz[3] == doctest::Approx(-g.y()).epsilon(1e-14));
}

TEST_CASE("monodromy matrix is symplectic with unit determinant") {
    const PhasePoint z0{0, 0.3, 1.5, 0.2};
    const auto [z1, M] = flow_with_tangent(z0, 20.0);
    Mat4 J = Mat4::Zero();
    J(0, 2) = J(1, 3) = 1;
    J(2, 0) = J(3, 1) = -1;
    CHECK((M.transpose() * J * M - J).norm() < 1e-8);
    CHECK(M.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    // endpoint agrees with the plain flow
    const PhasePoint z1b = flow(z0, 20.0);
    CHECK(z1.x == doctest::Approx(z1b.x).epsilon(1e-10).scale(1.0));
    CHECK(z1.py == doctest::Approx(z1b.py).epsilon(1e-10).scale(1.0));
}

TEST_CASE("monodromy approaches identity after one small oscillation period") {
    // near the minimum both modes share omega0 = sqrt(5)/3, so the harmonic
    // monodromy after T = 2 pi/omega0 is the identity; anharmonic corrections
    // enter at first order in the amplitude
    const double T = 2 * std::numbers::pi * 3 / std::sqrt(5.0);
    const double a = 1e-4;
    const auto [z1, M] = flow_with_tangent({a, 0, 0, 0}, T);
    CHECK((M - Mat4::Identity()).norm() < 50 * a);
}

TEST_CASE("lyapunov exponent separates regular from chaotic motion") {
    // near-harmonic orbit: exponent shrinks like log(t)/t
    const double lam_reg = lyapunov_exponent({0.05, 0.02, 0, 0}, 1500.0, 10.0);
    CHECK(std::abs(lam_reg) < 6e-3);
    // disordered orbit in the chaotic sea at eps = 7
    const PhasePoint z0{0, 0, std::sqrt(24.0), 2.0};
    const double lam_chaos = lyapunov_exponent(z0, 1500.0, 10.0);
    CHECK(lam_chaos > 10 * std::abs(lam_reg));
    CHECK(lam_chaos > 0.05);
}

TEST_SUITE_END();
