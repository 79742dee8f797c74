#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "ringtrio/orbits.hpp"

using namespace ringtrio;

namespace {

// 2 pi / omega with omega the y-eigenfrequency sqrt(5)/3 of the Hessian
constexpr double kHarmonicPeriod = 8.42977767724887167;

double winding_number(const Trajectory& path) {
    double w = 0;
    double prev = std::atan2(path.samples[0].z.y, path.samples[0].z.x);
    for (std::size_t i = 1; i < path.samples.size(); ++i) {
        const double a = std::atan2(path.samples[i].z.y, path.samples[i].z.x);
        double d = a - prev;
        while (d > M_PI) d -= 2 * M_PI;
        while (d < -M_PI) d += 2 * M_PI;
        w += d;
        prev = a;
    }
    return w / (2 * M_PI);
}

void check_monodromy_invariants(const PeriodicOrbit& orb) {
    const Mat4& M = orb.monodromy;
    CHECK(std::abs(M.determinant() - 1.0) < 1e-8);
    Mat4 J = Mat4::Zero();
    J.topRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
    J.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
    CHECK((M.transpose() * J * M - J).cwiseAbs().maxCoeff() < 1e-7);
    // spectrum {1, 1, s, 1/s}: every eigenvalue's reciprocal is an eigenvalue
    const auto ev = M.eigenvalues();
    for (int i = 0; i < 4; ++i) {
        double best = 1e300;
        for (int j = 0; j < 4; ++j)
            best = std::min(best, std::abs(1.0 / ev[i] - ev[j]));
        CHECK(best < 1e-6);
    }
    // the reduced transverse trace accounts for the nontrivial pair
    CHECK(std::abs(M.trace() - (2.0 + orb.trace)) < 1e-6);
}

}  // namespace

TEST_SUITE("orbits") {

TEST_CASE("libration period quadrature: harmonic limit and anchors") {
    CHECK(std::abs(period_A_quadrature(1e-6, 512) - kHarmonicPeriod) < 3e-5);
    // approach from above the anharmonic shift, monotonically
    double prev = period_A_quadrature(1e-2);
    CHECK(std::abs(prev - kHarmonicPeriod) < 0.25);
    for (double eps : {1e-3, 1e-4}) {
        const double t = period_A_quadrature(eps);
        CHECK(std::abs(t - kHarmonicPeriod) < std::abs(prev - kHarmonicPeriod));
        prev = t;
    }
    // node-count convergence and frozen anchors
    CHECK(std::abs(period_A_quadrature(7.0, 128) - period_A_quadrature(7.0, 512)) <
          1e-11);
    CHECK(period_A_quadrature(7.0) == doctest::Approx(1.7033160988084635).epsilon(1e-11));
    CHECK(period_A_quadrature(1.0) == doctest::Approx(3.7253800322462522).epsilon(1e-11));
    // order one at eps = 7, decreasing with energy
    double last = 1e300;
    for (double eps : {1.0, 2.5, 4.0, 5.5, 7.0, 8.5, 10.0}) {
        const double t = period_A_quadrature(eps);
        CHECK(t > 0.1);
        CHECK(t < 10.0);
        CHECK(t < last);
        last = t;
    }
    CHECK_THROWS_AS(period_A_quadrature(0.0), std::invalid_argument);
    CHECK_THROWS_AS(period_A_quadrature(-1.0), std::invalid_argument);
}

TEST_CASE("libration orbit record at eps = 7") {
    const auto orb = orbit_A_quadrature(7.0);
    CHECK(orb.family == Family::A0);
    CHECK(orb.stable);
    CHECK(orb.trace == doctest::Approx(0.90891710284300364).epsilon(1e-8));
    CHECK(orb.residual < 1e-9);
    CHECK(orb.path.max_energy_drift < 1e-9);
    CHECK(orb.path.samples.size() == 513);
    check_monodromy_invariants(orb);
    const auto st = stability(orb);
    CHECK(st.stable);
    CHECK(st.lyapunov == 0.0);
    CHECK(st.trace == orb.trace);
    CHECK(detect_family(orb.path) == Family::A0);
}

TEST_CASE("shooting from a noisy libration guess matches the quadrature") {
    const auto exact = orbit_A_quadrature(7.0);
    PhasePoint g = exact.start;
    g.x += 1e-3;
    g.y -= 0.7e-3;
    g.px += 0.4e-3;
    g.py += 1e-3;
    const auto orb = find_periodic(g, 7.0, Family::A0);
    CHECK(orb.family == Family::A0);
    const double tq = period_A_quadrature(7.0);
    CHECK(std::abs(orb.period - tq) / tq < 1e-8);
    CHECK(orb.residual < 1e-9);
}

TEST_CASE("rotated librations: identical periods, identical traces") {
    const auto a0 = orbit_A_quadrature(7.0);
    const auto a1 =
        find_periodic(apply_symmetry(symmetry_op(SymKind::R), a0.start), 7.0);
    const auto a2 =
        find_periodic(apply_symmetry(symmetry_op(SymKind::Rinv), a0.start), 7.0);
    CHECK(a1.family == Family::A1);
    CHECK(a2.family == Family::A2);
    CHECK(std::abs(a1.period - a0.period) / a0.period < 1e-10);
    CHECK(std::abs(a2.period - a0.period) / a0.period < 1e-10);
    CHECK(a1.trace == doctest::Approx(a0.trace).epsilon(1e-8));
    CHECK(a2.trace == doctest::Approx(a0.trace).epsilon(1e-8));
    check_monodromy_invariants(a1);
}

TEST_CASE("rotating family from the low-energy seed") {
    const auto cp = find_periodic(seed_C(0.05, true), 0.05, Family::Cp);
    const auto cm = find_periodic(seed_C(0.05, false), 0.05, Family::Cm);
    CHECK(cp.family == Family::Cp);
    CHECK(cm.family == Family::Cm);
    CHECK(cp.stable);
    CHECK(cm.stable);
    CHECK(cp.period == doctest::Approx(7.2227645703346663).epsilon(1e-9));
    CHECK(std::abs(cm.period - cp.period) / cp.period < 1e-10);
    CHECK(winding_number(cp.path) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(winding_number(cm.path) == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("pseudo-arclength continuation of the libration tracks the quadrature") {
    const auto seed = orbit_A_quadrature(2.0);
    const auto fam = continue_family(seed, 1.0, 10.0, 12);
    REQUIRE(fam.size() == 12);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        const double eps = 1.0 + 9.0 * k / 11.0;
        CHECK(std::abs(fam[k].energy - eps) < 1e-9);
        CHECK(fam[k].family == Family::A0);
        CHECK(fam[k].stable);
        const double tq = period_A_quadrature(fam[k].energy);
        CHECK(std::abs(fam[k].period - tq) / tq < 1e-8);
        CHECK(fam[k].residual < 1e-9);
    }
    CHECK_THROWS_AS(continue_family(seed, 5.0, 1.0, 10), std::invalid_argument);
}

TEST_CASE("rotating family continued to high energy stays stable") {
    const auto seed = find_periodic(seed_C(0.05, true), 0.05, Family::Cp);
    const auto fam = continue_family(seed, 1.0, 10.0, 4);
    REQUIRE(fam.size() == 4);
    for (const auto& o : fam) {
        CHECK(o.family == Family::Cp);
        CHECK(o.stable);
        CHECK(o.residual < 1e-9);
        CHECK(winding_number(o.path) == doctest::Approx(1.0).epsilon(0.05));
    }
    // eps grid 1, 4, 7, 10: anchors at eps = 7
    const auto& c7 = fam[2];
    CHECK(c7.energy == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(c7.period == doctest::Approx(1.4936602921932243).epsilon(1e-9));
    CHECK(c7.trace == doctest::Approx(-1.8699917153961023).epsilon(1e-6));
    CHECK(c7.start.y == doctest::Approx(-0.65903092942734265).epsilon(1e-6));
    CHECK(std::abs(c7.start.py) < 1e-9);  // sits on the symmetry line
    check_monodromy_invariants(c7);
}

TEST_CASE("section census at eps = 7: three librations, three arcs, two loops") {
    const auto found = discover_section_orbits(7.0, 40);
    REQUIRE(found.size() == 7);
    int n_a = 0, n_b = 0, n_c = 0;
    double t_a = 0, t_b = 0, t_c = 0;
    for (const auto& o : found) {
        CHECK(o.residual < 1e-9);
        switch (o.family) {
            case Family::A1:
            case Family::A2:
                ++n_a;
                CHECK(o.stable);
                if (t_a == 0) t_a = o.period;
                CHECK(std::abs(o.period - t_a) / t_a < 1e-10);
                CHECK(o.trace == doctest::Approx(0.90891710284300364).epsilon(1e-7));
                break;
            case Family::B1:
            case Family::B2:
            case Family::B3:
                ++n_b;
                CHECK(!o.stable);
                CHECK(o.lyapunov > 0.0);
                if (t_b == 0) t_b = o.period;
                CHECK(std::abs(o.period - t_b) / t_b < 1e-10);
                CHECK(o.trace == doctest::Approx(2.1998639982107306).epsilon(1e-6));
                CHECK(o.lyapunov == doctest::Approx(0.26082479802089675).epsilon(1e-6));
                break;
            case Family::Cp:
            case Family::Cm:
                ++n_c;
                CHECK(o.stable);
                if (t_c == 0) t_c = o.period;
                CHECK(std::abs(o.period - t_c) / t_c < 1e-10);
                break;
            default:
                CHECK(false);
        }
    }
    CHECK(n_a == 2);  // plus the in-plane libration found by quadrature: 3 total
    CHECK(n_b == 3);
    CHECK(n_c == 2);
    CHECK(t_b == doctest::Approx(1.7000677895480709).epsilon(1e-9));
    CHECK(t_c == doctest::Approx(1.4936602921932243).epsilon(1e-9));
    // the in-plane libration completes the family-A census
    const auto a0 = orbit_A_quadrature(7.0);
    CHECK(a0.family == Family::A0);
    CHECK(std::abs(a0.period - t_a) / t_a < 1e-10);
}

TEST_CASE("guess validation") {
    CHECK_THROWS_AS(find_periodic({0, 0.2, 0, 0}, 7.0), std::invalid_argument);
    CHECK_THROWS_AS(find_periodic({0, 0.2, 0.1, 0.1}, 0.001), std::invalid_argument);
    CHECK_THROWS_AS(find_periodic({0, -2.0, 0.1, 0.1}, 7.0), std::invalid_argument);
}

}  // TEST_SUITE
