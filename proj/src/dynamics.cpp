#include "ringtrio/dynamics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ringtrio/potential_core.hpp"

namespace ringtrio {

void HamiltonianFlow::operator()(long double, const OdeState<4>& z,
                                 OdeState<4>& dz) const {
    long double gx, gy;
    detail::potential_grad_t(z[0], z[1], gx, gy);
    dz[0] = z[2] / 2;
    dz[1] = z[3] / 2;
    dz[2] = -gx;
    dz[3] = -gy;
}

void VariationalFlow::operator()(long double, const OdeState<20>& z,
                                 OdeState<20>& dz) const {
    long double gx, gy, hxx, hxy, hyy;
    detail::potential_grad_t(z[0], z[1], gx, gy);
    detail::potential_hess_t(z[0], z[1], hxx, hxy, hyy);
    dz[0] = z[2] / 2;
    dz[1] = z[3] / 2;
    dz[2] = -gx;
    dz[3] = -gy;
    // columns of M: dz[4 + 4j .. 7 + 4j] = A * z[4 + 4j .. 7 + 4j]
    for (int j = 0; j < 4; ++j) {
        const long double* m = &z[4 + 4 * j];
        long double* dm = &dz[4 + 4 * j];
        dm[0] = m[2] / 2;
        dm[1] = m[3] / 2;
        dm[2] = -hxx * m[0] - hxy * m[1];
        dm[3] = -hxy * m[0] - hyy * m[1];
    }
}

OdeOptions default_ode_options() {
    OdeOptions opt;
    opt.rtol = 1e-13;
    opt.atol = 1e-13;
    return opt;
}

namespace {

OdeState<4> pack(const PhasePoint& z) {
    return {z.x, z.y, z.px, z.py};
}

PhasePoint unpack(const OdeState<4>& y) {
    return {(double)y[0], (double)y[1], (double)y[2], (double)y[3]};
}

}  // namespace

PhasePoint flow(const PhasePoint& z0, double t, const OdeOptions& opt) {
    if (t == 0) return z0;
    Dop853<4, HamiltonianFlow> stepper{HamiltonianFlow{}, opt};
    stepper.reset(0, pack(z0));
    stepper.advance_to(t);
    return unpack(stepper.y());
}

Trajectory integrate(const PhasePoint& z0, double t_final, double dt_sample,
                     const OdeOptions& opt) {
    if (!(t_final > 0) || !(dt_sample > 0))
        throw std::invalid_argument("integrate: t_final and dt_sample must be > 0");
    Trajectory traj;
    traj.energy0 = energy(z0);
    const std::size_t n = (std::size_t)std::floor(t_final / dt_sample + 1e-9);
    traj.samples.reserve(n + 1);
    traj.samples.push_back({0.0, z0});
    Dop853<4, HamiltonianFlow> stepper{HamiltonianFlow{}, opt};
    stepper.reset(0, pack(z0));
    for (std::size_t k = 1; k <= n; ++k) {
        const long double tk = (long double)dt_sample * k;
        stepper.advance_to(tk);
        const PhasePoint zk = unpack(stepper.y());
        traj.samples.push_back({(double)tk, zk});
        const double drift = std::abs(energy(zk) - traj.energy0);
        traj.max_energy_drift = std::max(traj.max_energy_drift, drift);
    }
    traj.stats = stepper.stats();
    return traj;
}

std::pair<PhasePoint, Mat4> flow_with_tangent(const PhasePoint& z0, double t,
                                              const OdeOptions& opt) {
    OdeState<20> y{};
    const OdeState<4> z = pack(z0);
    for (int i = 0; i < 4; ++i) y[i] = z[i];
    for (int j = 0; j < 4; ++j) y[4 + 5 * j] = 1;  // M = identity
    Dop853<20, VariationalFlow> stepper{VariationalFlow{}, opt};
    stepper.reset(0, y);
    if (t != 0) stepper.advance_to(t);
    const OdeState<20>& yf = stepper.y();
    Mat4 M;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) M(i, j) = (double)yf[4 + 4 * j + i];
    OdeState<4> zf;
    for (int i = 0; i < 4; ++i) zf[i] = yf[i];
    return {unpack(zf), M};
}

double lyapunov_exponent(const PhasePoint& z0, double t_total, double t_renorm,
                         const OdeOptions& opt, unsigned seed) {
    if (!(t_total > 0) || !(t_renorm > 0) || t_renorm > t_total)
        throw std::invalid_argument("lyapunov_exponent: bad time arguments");
    // state + one tangent vector
    struct Rhs {
        void operator()(long double, const OdeState<8>& z, OdeState<8>& dz) const {
            long double gx, gy, hxx, hxy, hyy;
            detail::potential_grad_t(z[0], z[1], gx, gy);
            detail::potential_hess_t(z[0], z[1], hxx, hxy, hyy);
            dz[0] = z[2] / 2;
            dz[1] = z[3] / 2;
            dz[2] = -gx;
            dz[3] = -gy;
            dz[4] = z[6] / 2;
            dz[5] = z[7] / 2;
            dz[6] = -hxx * z[4] - hxy * z[5];
            dz[7] = -hxy * z[4] - hyy * z[5];
        }
    };
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    OdeState<8> y{};
    const OdeState<4> z = pack(z0);
    for (int i = 0; i < 4; ++i) y[i] = z[i];
    long double norm2 = 0;
    for (int i = 4; i < 8; ++i) {
        y[i] = gauss(rng);
        norm2 += y[i] * y[i];
    }
    for (int i = 4; i < 8; ++i) y[i] /= std::sqrt(norm2);

    Dop853<8, Rhs> stepper{Rhs{}, opt};
    stepper.reset(0, y);
    long double log_sum = 0;
    long double t = 0;
    const auto n_renorm = (std::size_t)std::ceil(t_total / t_renorm - 1e-9);
    for (std::size_t k = 0; k < n_renorm; ++k) {
        const long double tk = std::min((long double)t_total,
                                        (long double)t_renorm * (k + 1));
        stepper.advance_to(tk);
        OdeState<8> w = stepper.y();
        norm2 = 0;
        for (int i = 4; i < 8; ++i) norm2 += w[i] * w[i];
        const long double nrm = std::sqrt(norm2);
        log_sum += std::log(nrm);
        for (int i = 4; i < 8; ++i) w[i] /= nrm;
        t = tk;
        stepper.reset(t, w);
    }
    return (double)(log_sum / t);
}

}  // namespace ringtrio
