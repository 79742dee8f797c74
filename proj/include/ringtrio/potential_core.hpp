// Precision-templated kernels for the pair potential and its derivatives.
// The double-precision public API (model.cpp) and the long double integrator
// internals both call these, so every code path evaluates the exact same
// expressions.
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ringtrio::detail {

inline constexpr double kArgGuard = 1e-6;

// The three sine arguments of the pair potential.  a[0] tracks the (1,2)
// pair, a[1] and a[2] the two pairs involving particle 3.  Each argument is
// pi/3 at the equilateral configuration and vanishes at a pairwise collision.
template <class Real>
inline std::array<Real, 3> sine_args(Real x, Real y) {
    constexpr Real third_pi = std::numbers::pi_v<Real> / 3;
    const Real s = std::numbers::sqrt3_v<Real> / 2 * x;
    return {third_pi + y, third_pi + s - y / 2, third_pi - s - y / 2};
}

template <class Real>
inline bool args_in_domain(const std::array<Real, 3>& a) {
    constexpr Real lo = kArgGuard;
    constexpr Real hi = std::numbers::pi_v<Real> - kArgGuard;
    for (Real ai : a)
        if (!(ai >= lo && ai <= hi)) return false;
    return true;
}

template <class Real>
inline void check_domain(const std::array<Real, 3>& a) {
    if (!args_in_domain(a))
        throw std::domain_error(
            "potential: configuration at or beyond a collision boundary");
}

// Gradients d a_i / d(x, y) of the three arguments.
template <class Real>
inline std::array<std::array<Real, 2>, 3> arg_grads() {
    const Real s = std::numbers::sqrt3_v<Real> / 2;
    return {{{Real(0), Real(1)}, {s, Real(-0.5)}, {-s, Real(-0.5)}}};
}

// v = sum_i 1/(64 sin^6 a_i) - 1/9;  v(0, 0) = 0.
template <class Real>
inline Real potential_t(Real x, Real y) {
    const auto a = sine_args(x, y);
    check_domain(a);
    Real sum = 0;
    for (Real ai : a) {
        const Real si = std::sin(ai);
        const Real inv2 = 1 / (si * si);
        sum += inv2 * inv2 * inv2;
    }
    return sum / 64 - Real(1) / 9;
}

template <class Real>
inline void potential_grad_t(Real x, Real y, Real& gx, Real& gy) {
    const auto a = sine_args(x, y);
    check_domain(a);
    const auto da = arg_grads<Real>();
    gx = 0;
    gy = 0;
    for (int i = 0; i < 3; ++i) {
        const Real si = std::sin(a[i]), ci = std::cos(a[i]);
        const Real inv2 = 1 / (si * si);
        const Real fp = -6 * inv2 * inv2 * inv2 * ci / si;  // d(sin^-6)/da
        gx += fp * da[i][0];
        gy += fp * da[i][1];
    }
    gx /= 64;
    gy /= 64;
}

template <class Real>
inline void potential_hess_t(Real x, Real y, Real& hxx, Real& hxy, Real& hyy) {
    const auto a = sine_args(x, y);
    check_domain(a);
    const auto da = arg_grads<Real>();
    hxx = 0;
    hxy = 0;
    hyy = 0;
    for (int i = 0; i < 3; ++i) {
        const Real si = std::sin(a[i]), ci = std::cos(a[i]);
        const Real inv2 = 1 / (si * si);
        const Real inv6 = inv2 * inv2 * inv2;
        const Real f2 = inv6 * (42 * ci * ci * inv2 + 6);  // d2(sin^-6)/da2
        hxx += f2 * da[i][0] * da[i][0];
        hxy += f2 * da[i][0] * da[i][1];
        hyy += f2 * da[i][1] * da[i][1];
    }
    hxx /= 64;
    hxy /= 64;
    hyy /= 64;
}

}  // namespace ringtrio::detail
