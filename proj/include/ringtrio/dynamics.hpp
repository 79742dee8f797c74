// Time evolution of the reduced two-degree-of-freedom system: plain
// trajectories, the linearized (tangent) flow, and Lyapunov exponents.
#pragma once

#include <utility>
#include <vector>

#include "ringtrio/model.hpp"
#include "ringtrio/ode.hpp"

namespace ringtrio {

using Mat4 = Eigen::Matrix4d;

// dz/dt for z = (x, y, px, py): xdot = px/2, ydot = py/2, pdot = -grad v
// (the relative problem carries an effective mass of 2).
struct HamiltonianFlow {
    void operator()(long double t, const OdeState<4>& z, OdeState<4>& dz) const;
};

// Trajectory plus the 4x4 tangent block M(t), dM/dt = A(t) M, stored
// column-major in z[4..19].
struct VariationalFlow {
    void operator()(long double t, const OdeState<20>& z, OdeState<20>& dz) const;
};

struct TrajectorySample {
    double t;
    PhasePoint z;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double energy0 = 0;
    double max_energy_drift = 0;  // max |E(t) - E(0)| over the samples
    OdeStats stats;
};

OdeOptions default_ode_options();

// State after time t.
PhasePoint flow(const PhasePoint& z0, double t,
                const OdeOptions& opt = default_ode_options());

// Samples at k * dt_sample for k = 0..floor(t_final/dt_sample); every sample
// lies on the integrated trajectory (no interpolation).
Trajectory integrate(const PhasePoint& z0, double t_final, double dt_sample,
                     const OdeOptions& opt = default_ode_options());

// Endpoint together with the monodromy (tangent) matrix after time t.
std::pair<PhasePoint, Mat4> flow_with_tangent(
    const PhasePoint& z0, double t,
    const OdeOptions& opt = default_ode_options());

// Largest Lyapunov exponent by tangent-vector renormalization.
double lyapunov_exponent(const PhasePoint& z0, double t_total,
                         double t_renorm = 10.0,
                         const OdeOptions& opt = default_ode_options(),
                         unsigned seed = 12345);

}  // namespace ringtrio
