#include <cmath>
#include <numbers>
#include <stdexcept>

#include <doctest.h>

#include "ringtrio/ode.hpp"

using namespace ringtrio;

namespace {

constexpr double kPi = std::numbers::pi;

// harmonic oscillator y'' = -y as a 2d first order system
struct Oscillator {
    void operator()(long double, const OdeState<2>& z, OdeState<2>& dz) const {
        dz[0] = z[1];
        dz[1] = -z[0];
    }
};

}  // namespace

TEST_SUITE_BEGIN("ode");

TEST_CASE("oscillator stays on the analytic solution over many periods") {
    Dop853<2, Oscillator> stepper{Oscillator{}, OdeOptions{}};
    stepper.reset(0, {1.0L, 0.0L});
    stepper.advance_to(20 * kPi);
    CHECK(std::abs((double)stepper.y()[0] - 1.0) < 1e-10);
    CHECK(std::abs((double)stepper.y()[1]) < 1e-10);
    CHECK(stepper.stats().n_accepted > 10);
    CHECK(stepper.stats().n_evals > 12 * stepper.stats().n_accepted);
}

TEST_CASE("backward integration works") {
    Dop853<2, Oscillator> stepper{Oscillator{}, OdeOptions{}};
    stepper.reset(0, {1.0L, 0.0L});
    stepper.advance_to(-5.0);
    CHECK((double)stepper.y()[0] == doctest::Approx(std::cos(5.0)).epsilon(1e-10));
    CHECK((double)stepper.y()[1] == doctest::Approx(std::sin(5.0)).epsilon(1e-10));
}

TEST_CASE("tighter tolerances reduce the error") {
    auto run = [](double tol) {
        OdeOptions opt;
        opt.rtol = opt.atol = tol;
        Dop853<2, Oscillator> stepper{Oscillator{}, opt};
        stepper.reset(0, {1.0L, 0.0L});
        stepper.advance_to(40 * kPi);
        return std::abs((double)stepper.y()[0] - 1.0);
    };
    CHECK(run(1e-13) < run(1e-6));
    CHECK(run(1e-6) < 1e-4);
}

TEST_CASE("hermite interpolant tracks the solution inside a step") {
    Dop853<2, Oscillator> stepper{Oscillator{}, OdeOptions{}};
    stepper.reset(0, {1.0L, 0.0L});
    for (int k = 0; k < 5; ++k) {
        const auto span = stepper.step(10.0);
        const long double tm = (span.t0 + span.t1) / 2;
        const auto ym = span.eval(tm);
        // seeding-grade accuracy only: the interpolant is cubic while the
        // accepted steps are sized for the 8th order solution
        CHECK(std::abs((double)(ym[0] - std::cos((double)tm))) < 2e-5);
        CHECK(std::abs((double)(ym[1] + std::sin((double)tm))) < 2e-5);
    }
}

TEST_CASE("crossing location lands on the trajectory") {
    Dop853<2, Oscillator> stepper{Oscillator{}, OdeOptions{}};
    stepper.reset(0, {1.0L, 0.0L});
    bool found = false;
    while (stepper.t() < 3.0 && !found) {
        const auto span = stepper.step(3.0);
        if (span.y0[0] > 0 && span.y1[0] <= 0) {
            const auto [tc, yc] =
                locate_crossing<2, Oscillator>(Oscillator{}, stepper.options(),
                                               span, 0, 0.0L, 1e-13);
            CHECK(std::abs((double)(tc - kPi / 2)) < 1e-11);
            CHECK((double)yc[1] == doctest::Approx(-1.0).epsilon(1e-11));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("exhausting the step budget throws") {
    OdeOptions opt;
    opt.max_steps = 3;
    Dop853<2, Oscillator> stepper{Oscillator{}, opt};
    stepper.reset(0, {1.0L, 0.0L});
    CHECK_THROWS_AS(stepper.advance_to(1000.0), std::runtime_error);
}

TEST_SUITE_END();
