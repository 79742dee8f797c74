#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "ringtrio/model.hpp"

using namespace ringtrio;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE_BEGIN("model");

TEST_CASE("potential vanishes at the equilateral configuration") {
    CHECK(std::abs(potential(0, 0)) < 1e-15);
    // and the origin is a strict minimum nearby
    for (double ang = 0; ang < 6.28; ang += 0.7)
        CHECK(potential(1e-3 * std::cos(ang), 1e-3 * std::sin(ang)) > 0);
}

TEST_CASE("potential matches high-precision reference values") {
    // 40-digit arithmetic reference evaluations of the defining formula
    CHECK(potential(0, 0.5) == doctest::Approx(0.1376460561957428540819843).epsilon(1e-14));
    CHECK(potential(0.3, -0.2) == doctest::Approx(0.0658987815030611314381162).epsilon(1e-14));
}

TEST_CASE("gradient matches finite differences and reference values") {
    const double h = 1e-6;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(-0.8, 0.8), uy(-0.6, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double x = ux(rng), y = uy(rng);
        if (!in_domain(x, y)) continue;
        const Vec2 g = grad_potential(x, y);
        const double fdx = (potential(x + h, y) - potential(x - h, y)) / (2 * h);
        const double fdy = (potential(x, y + h) - potential(x, y - h)) / (2 * h);
        CHECK(g.x() == doctest::Approx(fdx).epsilon(1e-6).scale(1.0));
        CHECK(g.y() == doctest::Approx(fdy).epsilon(1e-6).scale(1.0));
    }
    const Vec2 g = grad_potential(0.3, -0.2);
    CHECK(g.x() == doctest::Approx(0.2895745695575455971134792).epsilon(1e-14));
    CHECK(g.y() == doctest::Approx(-0.2835098812130195111157239).epsilon(1e-14));
}

TEST_CASE("hessian matches finite differences and reference values") {
    const double h = 1e-6;
    const double x = 0.3, y = -0.2;
    const Mat2 H = hessian_potential(x, y);
    const Vec2 gxp = grad_potential(x + h, y), gxm = grad_potential(x - h, y);
    const Vec2 gyp = grad_potential(x, y + h), gym = grad_potential(x, y - h);
    CHECK(H(0, 0) == doctest::Approx((gxp.x() - gxm.x()) / (2 * h)).epsilon(1e-7));
    CHECK(H(0, 1) == doctest::Approx((gyp.x() - gym.x()) / (2 * h)).epsilon(1e-7));
    CHECK(H(1, 0) == doctest::Approx((gxp.y() - gxm.y()) / (2 * h)).epsilon(1e-7));
    CHECK(H(1, 1) == doctest::Approx((gyp.y() - gym.y()) / (2 * h)).epsilon(1e-7));

    CHECK(H(0, 0) == doctest::Approx(1.915547410206046087921985).epsilon(1e-14));
    CHECK(H(0, 1) == doctest::Approx(1.001084589575904021811418).epsilon(1e-14));
    CHECK(H(1, 1) == doctest::Approx(4.058756652362824431829954).epsilon(1e-14));
}

TEST_CASE("hessian at the minimum is isotropic with curvature 10/9") {
    const Mat2 H = hessian_potential(0, 0);
    CHECK(H(0, 0) == doctest::Approx(10.0 / 9.0).epsilon(1e-13));
    CHECK(H(1, 1) == doctest::Approx(10.0 / 9.0).epsilon(1e-13));
    CHECK(std::abs(H(0, 1)) < 1e-13);
    // small oscillations: omega0 = sqrt(curvature / effective mass 2)... the
    // degenerate pair has omega0 = sqrt(5)/3 with the kinetic term p^2/4
    const double omega0 = std::sqrt(H(0, 0) / 2.0);
    CHECK(omega0 == doctest::Approx(0.7453559924999298988030579).epsilon(1e-13));
    CHECK(2 * kPi / omega0 == doctest::Approx(8.42977767724887167178765).epsilon(1e-13));
}

TEST_CASE("potential is invariant under the C3v operations") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(-0.7, 0.7), uy(-0.5, 0.9);
    const auto ops = all_symmetry_ops();
    for (int k = 0; k < 30; ++k) {
        const double x = ux(rng), y = uy(rng);
        if (!in_domain(x, y)) continue;
        const double v0 = potential(x, y);
        for (const auto& op : ops) {
            const Vec2 r = op.matrix * Vec2(x, y);
            CHECK(potential(r.x(), r.y()) == doctest::Approx(v0).epsilon(1e-12));
        }
    }
}

TEST_CASE("symmetry operations satisfy the group algebra") {
    const Mat2 R = symmetry_op(SymKind::R).matrix;
    const Mat2 S = symmetry_op(SymKind::S).matrix;
    CHECK((R * R * R - Mat2::Identity()).norm() < 1e-14);
    CHECK((S * S - Mat2::Identity()).norm() < 1e-14);
    CHECK((S * R * S - R.transpose()).norm() < 1e-14);
    for (const auto& op : all_symmetry_ops())
        CHECK((op.matrix * op.matrix.transpose() - Mat2::Identity()).norm() < 1e-14);
}

TEST_CASE("rotation matches the cyclic particle relabeling") {
    // (th1, th2, th3) -> (th3 - 2pi, th1, th2) must act on (x, y) as the
    // counterclockwise 2pi/3 rotation and shift z by -2pi/3.
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.3, 1.4);
    const Mat2 R = symmetry_op(SymKind::R).matrix;
    for (int k = 0; k < 20; ++k) {
        const double th1 = u(rng), th2 = th1 + u(rng), th3 = th2 + u(rng);
        const auto j0 = jacobi_from_angles(th1, th2, th3);
        const auto j1 = jacobi_from_angles(th3 - 2 * kPi, th1, th2);
        const Vec2 rot = R * Vec2(j0[0], j0[1]);
        CHECK(j1[0] == doctest::Approx(rot.x()).epsilon(1e-12).scale(1.0));
        CHECK(j1[1] == doctest::Approx(rot.y()).epsilon(1e-12).scale(1.0));
        CHECK(j1[2] == doctest::Approx(j0[2] - 2 * kPi / 3).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("jacobi coordinates round-trip") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 20; ++k) {
        const double x = u(rng), y = u(rng), z = u(rng);
        const auto th = angles_from_jacobi(x, y, z);
        const auto j = jacobi_from_angles(th[0], th[1], th[2]);
        CHECK(j[0] == doctest::Approx(x).epsilon(1e-12).scale(1.0));
        CHECK(j[1] == doctest::Approx(y).epsilon(1e-12).scale(1.0));
        CHECK(j[2] == doctest::Approx(z).epsilon(1e-12).scale(1.0));
    }
    // the reference equally spaced configuration sits at the origin
    const auto j = jacobi_from_angles(0, 2 * kPi / 3, 4 * kPi / 3);
    CHECK(std::abs(j[0]) < 1e-14);
    CHECK(std::abs(j[1]) < 1e-14);
    CHECK(std::abs(j[2]) < 1e-14);
}

TEST_CASE("fundamental triangle geometry") {
    CHECK(triangle_area() == doctest::Approx(kPi * kPi / std::numbers::sqrt3).epsilon(1e-14));
    const auto v = triangle_vertices();
    // vertices are pairwise collision points: two sine arguments vanish there
    for (const auto& vert : v) CHECK_FALSE(in_domain(vert.x(), vert.y()));
    // side length 2 pi / sqrt(3)
    CHECK((v[1] - v[0]).norm() == doctest::Approx(2 * kPi / std::numbers::sqrt3).epsilon(1e-14));
    CHECK((v[2] - v[1]).norm() == doctest::Approx(2 * kPi / std::numbers::sqrt3).epsilon(1e-14));
}

TEST_CASE("collision boundary raises domain_error") {
    CHECK_THROWS_AS(potential(0, kTriangleYMin + 0.5e-6), std::domain_error);
    CHECK_THROWS_AS(grad_potential(0, kTriangleYMin + 0.5e-6), std::domain_error);
    CHECK_THROWS_AS(potential(0, kTriangleYMin - 0.1), std::domain_error);
    CHECK(in_domain(0, kTriangleYMin + 1.5e-6));
    CHECK_FALSE(in_domain(0, kTriangleYMin + 0.5e-6));
    CHECK_NOTHROW(potential(0, kTriangleYMin + 1.5e-6));
}

TEST_CASE("allowed angular momentum residues per irrep") {
    CHECK(allowed_angular_momenta(Irrep::A1) == std::set<int>{0});
    CHECK(allowed_angular_momenta(Irrep::A2) == std::set<int>{0});
    CHECK(allowed_angular_momenta(Irrep::Ep) == std::set<int>{2});
    CHECK(allowed_angular_momenta(Irrep::Em) == std::set<int>{1});
}

TEST_CASE("conversion to physical units (87Rb, C6/h = 3 GHz um^6, R = 7 um)") {
    const double C6_over_h = 3.0, R = 7.0, mass = 1.44316060e-25;
    // 40-digit arithmetic reference values
    CHECK(to_physical_units(7.0, UnitKind::EnergyHz, C6_over_h, R, mass) ==
          doctest::Approx(178497.05479859582317).epsilon(1e-12));
    CHECK(to_physical_units(1.0, UnitKind::TimeSeconds, C6_over_h, R, mass) ==
          doctest::Approx(0.00064693530109348389962).epsilon(1e-10));
    CHECK(to_physical_units(1.0, UnitKind::ActionJs, C6_over_h, R, mass) ==
          doctest::Approx(1.0930748295922949463e-32).epsilon(1e-10));
    // the effective Planck constant for these parameters
    const double hbar = 6.62607015e-34 / (2 * kPi);
    const double eta = hbar / to_physical_units(1.0, UnitKind::ActionJs, C6_over_h, R, mass);
    CHECK(eta == doctest::Approx(0.0096477550218542699332).epsilon(1e-10));
    // a splitting of 1 energy unit oscillates with period 1/unit_hz
    CHECK(to_physical_units(2.0, UnitKind::SplittingPeriodSeconds, C6_over_h, R, mass) ==
          doctest::Approx(1.0 / (2.0 * 25499.579256942260453)).epsilon(1e-12));
    CHECK_THROWS_AS(to_physical_units(1.0, UnitKind::EnergyHz, -1.0, R, mass),
                    std::invalid_argument);
    CHECK(unit_kind_from_string("energy_hz") == UnitKind::EnergyHz);
    CHECK_THROWS_AS(unit_kind_from_string("furlongs"), std::invalid_argument);
}

TEST_SUITE_END();
