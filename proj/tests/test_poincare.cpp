// Surface-of-section tests: crossing accuracy, boundary curves, orbit
// classification, synthetic box-dimension benchmarks, and the regular
// fraction of the energy surface.  Expected numbers were frozen from
// finite-difference / quadrature / long-integration cross-checks.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ringtrio/poincare.hpp"

using namespace ringtrio;

namespace {

// Places a section point (y, py) on the energy shell eps with x = 0, px > 0.
PhasePoint embed_section(double y, double py, double eps) {
    const double rest = eps - potential(0, y) - py * py / 4;
    REQUIRE(rest > 0);
    return {0, y, 2 * std::sqrt(rest), py};
}

std::vector<SectionPoint> unit_square_cloud(int n, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<SectionPoint> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng), (double)i, 0});
    return pts;
}

std::vector<SectionPoint> unit_circle_cloud(int n) {
    std::vector<SectionPoint> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double th = 2 * M_PI * i / n;
        pts.push_back({std::cos(th), std::sin(th), (double)i, 0});
    }
    return pts;
}

}  // namespace

TEST_SUITE("poincare") {

TEST_CASE("section crossings satisfy the section and energy constraints") {
    const double eps = 7.0;
    const PhasePoint z0 = embed_section(0.0, 2.0, eps);  // chaotic-sea start
    const auto recs = section_crossings(z0, 200, 2000.0);
    REQUIRE(recs.size() == 200);
    double prev_t = -1;
    for (const auto& r : recs) {
        CHECK(std::abs(r.z.x) <= 1e-10);          // polished onto the plane
        CHECK(std::abs(energy(r.z) - eps) <= 1e-8);  // emitted points keep energy
        CHECK(r.z.px > 0);                        // oriented crossings only
        CHECK(r.t > prev_t);
        prev_t = r.t;
    }

    CHECK_THROWS_AS(section_crossings(z0, 0, 100.0), std::invalid_argument);
    SectionSpec bad;
    bad.cross_index = 5;
    CHECK_THROWS_AS(section_crossings(z0, 5, 100.0, bad), std::invalid_argument);
}

TEST_CASE("section boundary lies on the energy contour") {
    for (double eps : {0.5, 7.0}) {
        const auto curve = section_boundary(eps, 256);
        REQUIRE(curve.size() >= 256);
        double py_max = 0, py_min = 0;
        for (const auto& q : curve) {
            CHECK(std::abs(q[1] * q[1] / 4 + potential(0, q[0]) - eps) <= 1e-8);
            py_max = std::max(py_max, q[1]);
            py_min = std::min(py_min, q[1]);
        }
        // closed curve: ends meet at the lower turning point, and the two
        // momentum branches are mirror images
        CHECK(curve.front()[0] == doctest::Approx(curve.back()[0]).epsilon(1e-12));
        CHECK(py_max == doctest::Approx(-py_min).epsilon(1e-12));
        // the sampled maximum sits near, not exactly at, the line minimum
        CHECK(py_max == doctest::Approx(2 * std::sqrt(eps)).epsilon(1e-3));
    }
    CHECK_THROWS_AS(section_boundary(7.0, 4), std::invalid_argument);
}

TEST_CASE("periodic section point reproduces across many returns") {
    // fixed point of the clockwise rotating family at eps = 7
    const PhasePoint c_plus{0, -0.65903092942734265, 2.6543476675637838, 0};
    const auto recs = section_crossings(c_plus, 50, 200.0);
    REQUIRE(recs.size() == 50);
    double worst = 0;
    for (const auto& r : recs)
        worst = std::max(worst, std::hypot(r.z.y - c_plus.y, r.z.py - c_plus.py));
    CHECK(worst <= 1e-8);  // measured 5.6e-11 at default tolerances
}

TEST_CASE("plane-confined start classifies without transversal crossings") {
    // the x = 0 libration never leaves the section plane; classification
    // falls back to the Lyapunov vote with the in-plane period
    const PhasePoint a0{0, 0, 0, 2 * std::sqrt(7.0)};
    const auto c = classify_orbit(a0, ClassifyOptions{});
    CHECK(c.kind == OrbitClass::Regular);
    CHECK(c.box_dimension == 0.0);
    CHECK(c.lambda_regular);
    CHECK(c.t_char == doctest::Approx(1.7033160988084635).epsilon(1e-6));
}

TEST_CASE("classification separates tori from the chaotic sea") {
    const double eps = 7.0;
    const ClassifyOptions copt;

    SUBCASE("torus around the clockwise rotating orbit") {
        const auto c = classify_orbit(embed_section(-0.649030929, 0.0, eps), copt);
        CHECK(c.kind == OrbitClass::Regular);
        CHECK(c.lambda * c.t_char < 0.03);
        CHECK(c.box_dimension < 1.4);
    }
    SUBCASE("torus around a rotated librating orbit") {
        const auto c =
            classify_orbit(embed_section(0.05, std::sqrt(7.0) - 0.15, eps), copt);
        CHECK(c.kind == OrbitClass::Regular);
        CHECK(c.box_dimension == doctest::Approx(1.08).epsilon(0.2));
    }
    SUBCASE("near an unstable bouncing orbit the motion is chaotic") {
        const auto c =
            classify_orbit(embed_section(-0.576827071 + 1e-3, 1e-3, eps), copt);
        CHECK(c.kind == OrbitClass::Chaotic);
        CHECK(c.lambda * c.t_char > 0.1);
    }
    SUBCASE("generic sea start is chaotic") {
        const auto c = classify_orbit(embed_section(0.0, 2.0, eps), copt);
        CHECK(c.kind == OrbitClass::Chaotic);
        CHECK(c.lambda * c.t_char > 0.1);
    }
}

TEST_CASE("section dataset of a plane-confined start is boundary only") {
    const double eps = 7.0;
    const PhasePoint a0{0, 0, 0, 2 * std::sqrt(eps)};
    const auto ds = section(a0, eps, 600);
    CHECK(ds.energy == eps);
    CHECK(ds.points.empty());       // no transversal crossings exist
    CHECK(ds.orbit_class.empty());  // too few points to classify
    CHECK(ds.boundary.size() >= 256);

    const PhasePoint off_shell{0, 0, 0, 2 * std::sqrt(eps) + 1e-3};
    CHECK_THROWS_AS(section(off_shell, eps, 600), std::invalid_argument);
}

TEST_CASE("box dimension of synthetic clouds") {
    CHECK(box_counting_dimension(unit_circle_cloud(600)) ==
          doctest::Approx(1.12).epsilon(0.2));
    CHECK(box_counting_dimension(unit_square_cloud(2000, 42)) > 1.8);
    CHECK(box_counting_dimension(unit_square_cloud(600, 42)) > 1.8);
    CHECK_THROWS_AS(box_counting_dimension(unit_circle_cloud(31)),
                    std::invalid_argument);
}

TEST_CASE("box dimension cannot veto a clear Lyapunov verdict") {
    const ClassifyOptions copt;
    const auto square = unit_square_cloud(2000, 42);
    const auto circle = unit_circle_cloud(600);
    // area-filling cloud with a regular Lyapunov vote: contradictory evidence
    CHECK(classify_points(square, 1e-6, copt).kind == OrbitClass::Indeterminate);
    // the same cloud with a clear positive exponent is chaotic
    CHECK(classify_points(square, 0.2, copt).kind == OrbitClass::Chaotic);
    // curve-like cloud with a tiny exponent is regular
    CHECK(classify_points(circle, 1e-6, copt).kind == OrbitClass::Regular);
    CHECK_THROWS_AS(classify_points(unit_square_cloud(400, 7), 0.1, copt),
                    std::invalid_argument);
}

TEST_CASE("chaotic clouds overlap pairwise, tori do not") {
    const double eps = 7.0;
    OdeOptions ode = default_ode_options();
    ode.rtol = ode.atol = 1e-10;
    auto cloud = [&](double y, double py, int n) {
        const auto recs = section_crossings(embed_section(y, py, eps), n, 40000.0,
                                            SectionSpec{}, ode);
        REQUIRE((int)recs.size() == n);
        std::vector<SectionPoint> pts;
        for (const auto& r : recs) pts.push_back({r.z.y, r.z.py, r.t, 0});
        return pts;
    };
    const auto sea_a = cloud(0.0, 2.0, 1500);
    const auto sea_b = cloud(-0.576827071 + 1e-3, 1e-3, 1500);
    const auto torus = cloud(-0.649030929, 0.0, 600);

    // two sea starts explore the same ergodic zone (measured 0.993)
    CHECK(chaotic_overlap(sea_a, sea_b, 24) > 0.9);
    // a torus curve shares almost no boxes with the sea (measured 0.0)
    CHECK(chaotic_overlap(sea_a, torus, 24) < 0.2);
    CHECK(chaotic_overlap(sea_a, sea_b, 24) ==
          doctest::Approx(chaotic_overlap(sea_b, sea_a, 24)));
    CHECK_THROWS_AS(chaotic_overlap({}, sea_a, 24), std::invalid_argument);
}

TEST_CASE("regular fraction in the near-integrable regime") {
    ClassifyOptions light;
    light.n_crossings = 500;
    light.t_lyapunov = 800;
    light.ode.rtol = light.ode.atol = 1e-9;

    const auto r = regular_fraction(0.01, 100, 1234, light);
    CHECK(r.n_total == 100);
    CHECK(r.n_regular + r.n_chaotic + r.n_indeterminate == r.n_total);
    CHECK(r.rho1 >= 0.95);  // near-harmonic regime: almost everything regular
    CHECK(r.rho1_liouville >= 0.95);
    CHECK(r.ci_low <= r.rho1);
    CHECK(r.rho1 <= r.ci_high);

    // same seed, same estimate, bit for bit
    const auto r2 = regular_fraction(0.01, 100, 1234, light);
    CHECK(r2.rho1 == r.rho1);
    CHECK(r2.rho1_liouville == r.rho1_liouville);
    CHECK(r2.n_regular == r.n_regular);
    CHECK(r2.n_chaotic == r.n_chaotic);
    CHECK(r2.n_indeterminate == r.n_indeterminate);
}

TEST_CASE("regular fraction rejects tiny sample counts") {
    CHECK_THROWS_AS(regular_fraction(7.0, 99, 1, ClassifyOptions{}),
                    std::invalid_argument);
}

}  // TEST_SUITE
