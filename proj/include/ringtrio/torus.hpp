// Fourier tori and EBK quantization for the regular families A (librating
// tubes around the median orbit) and C (rotating loops): fundamental
// frequencies by windowed spectral analysis with phase-fit refinement,
// lattice-constrained Fourier fits, Percival and circuit actions, and the
// two-dimensional root find that drives the actions onto quantized targets.
#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ringtrio/dynamics.hpp"
#include "ringtrio/orbits.hpp"

namespace ringtrio {

enum class TorusFamily { A, C };
std::string torus_family_name(TorusFamily f);  // "A" or "C"

// Closed circuits on a torus at fixed conjugate angle.  Axis 0 carries the
// transverse (family A) or radial (family C) motion, axis 1 the longitudinal
// libration (A) or the loop (C).
enum class Circuit { Transverse, Longitudinal, Radial, Loop };

struct FourierTorus {
    TorusFamily family = TorusFamily::A;
    std::array<double, 2> omega{};  // fundamental frequencies, both > 0

    // k = (k1, k2) -> complex coefficients (c_x, c_y) of r(theta); the map
    // holds both halves of the lattice with c_{-k} = conj(c_k), plus the
    // (0,0) mean.
    std::map<std::array<int, 2>, std::array<std::complex<double>, 2>> coeffs;

    std::array<double, 2> actions_percival{};  // (J_1, J_2)
    std::array<double, 2> actions_circuit{};   // (I_x|I_r, I_y|I_l)
    double energy = 0;
    double residual = 0;  // max position reconstruction error over the window

    // Global mass prefactor of the Percival action formula, fixed once by
    // cross-validation against the circuit line integrals (it equals
    // 2 m R^2 = 2 in working units) and recorded in every artifact.
    double percival_prefactor = 0;

    std::array<double, 2> position(double th1, double th2) const;
    std::array<double, 2> momentum(double th1, double th2) const;
};

struct TorusOptions {
    double t_max = 3700.0;  // fit window
    double dt = 0.01;       // sample spacing (high Nyquist avoids aliasing)
    int k_max = 3200;       // cap on retained lattice sites
    double coeff_floor = 1e-10;     // coefficients below this are dropped
    double residual_target = 1e-6;  // max position error accepted by the fit
    OdeOptions ode = torus_ode_defaults();

    static OdeOptions torus_ode_defaults() {
        OdeOptions o = default_ode_options();
        o.rtol = o.atol = 1e-12;
        return o;
    }
};

// Fundamental frequency pair of a regular trajectory, ordered per family:
// (transverse, longitudinal) for A, (radial, loop) for C.  The family is
// detected from the net winding of x + iy about the origin.  Extraction
// uses a Hann-windowed spectrum, quadratic peak interpolation, and
// refinement by maximizing the windowed projection amplitude.  Throws
// std::invalid_argument for degenerate (periodic) input and
// std::runtime_error with both candidates on an ambiguous peak.
std::array<double, 2> fundamental_frequencies(const Trajectory& traj);

// Least-squares Fourier fit on the frequency lattice k1*omega1 + k2*omega2
// by iterative peel-and-refine.  Residual above `residual_target` (or an
// off-lattice line) throws std::runtime_error: the input was not on an
// invariant torus of these frequencies.
FourierTorus fit_fourier(const Trajectory& traj,
                         const std::array<double, 2>& omega,
                         int k_max = 3200, double coeff_floor = 1e-10,
                         double residual_target = 1e-6);

// J_alpha = prefactor * sum_k k_alpha (k . omega) |r_k|^2 over the stored
// two-sided lattice.
std::array<double, 2> actions_percival(const FourierTorus& torus);

// I = (1/2pi) contour integral of p . dr along the circuit at fixed
// conjugate angle, trapezoidal rule over n_nodes >= 4096 nodes.
double action_circuit(const FourierTorus& torus, Circuit circuit,
                      int n_nodes = 4096, double fixed_angle = 0.0);

// Initial condition of the family chart at parameters (s, eps): family A
// launches from the triangle center with transverse momentum s; family C
// launches inward of the C+ section fixed point by s with py = 0.
PhasePoint torus_launch(TorusFamily family, double s, double eps);

// Full pipeline: integrate the chart trajectory, extract frequencies, fit,
// and attach actions.
FourierTorus make_torus(TorusFamily family, double s, double eps,
                        const TorusOptions& opt = {});

// Thin-torus limits used to seed the quantization root find (and as
// independent cross-checks): the longitudinal action of the x = 0 libration
// by turning-point quadrature, and the loop action of the C+ orbit.
double action_A_longitudinal(double eps, int n_nodes = 20000);
double action_C_loop(double eps, const ShootOptions& opt = {});

struct EbkOptions {
    double action_tol = 5e-5;  // |I - target| <= action_tol * eta
    int max_iterations = 40;
    double fd_step = 1e-4;     // finite-difference step of the Jacobian
    TorusOptions newton;       // fit options during the root find
    TorusOptions final;        // fit options of the returned torus

    EbkOptions() {
        newton.t_max = 1200.0;
        newton.dt = 0.02;
        newton.coeff_floor = 1e-7;
        newton.residual_target = 1e-3;
        // Quantized tori may sit near thin secondary-resonance chains whose
        // genuine sideband content is above the standalone 1e-6 gate; at
        // this level it shifts actions by far less than the tolerance.
        final.residual_target = 5e-5;
    }
};

struct EbkLevel {
    TorusFamily family = TorusFamily::A;
    std::array<int, 2> nu{};  // (nu_x, nu_y) for A, (nu_r, nu_l) for C
    double energy = 0;
    FourierTorus torus;
    // (irrep label, degeneracy kind): family A gives quasidegenerate
    // {A1, E} for even nu_x and {A2, E} for odd; family C gives
    // quasidegenerate {A1, A2} when nu_l = 0 mod 3 and an exact E doublet
    // otherwise.
    std::vector<std::pair<std::string, std::string>> irreps;
    double chart_s = 0;  // converged chart parameter (see torus_launch)
};

// Quantized-action targets in the internal single-angle circuit basis.
// Family A (Maslov 2, 4): eta(nu1 + 1/2, nu2 + 1).  Family C (Maslov 2, 2):
// the conventional longitudinal circuit winds both angles, so its action is
// I_r + I_l of the internal basis; the equivalent internal targets are
// eta(nu1 + 1/2) and eta(nu2 - nu1).
std::array<double, 2> ebk_targets(TorusFamily family, std::array<int, 2> nu,
                                  double eta);

std::vector<std::pair<std::string, std::string>> ebk_irreps(
    TorusFamily family, std::array<int, 2> nu);

// Two-dimensional Newton root find over the chart parameters (s, eps)
// driving the circuit actions onto the quantized targets.  Throws
// std::runtime_error when no torus with the requested actions exists in
// the regular region.
EbkLevel ebk_search(TorusFamily family, std::array<int, 2> nu, double eta,
                    const EbkOptions& opt = {});

// Levels nu2 = nu2_lo..nu2_hi at fixed nu1, warm-starting each search from
// the previous solution; an empty range yields an empty table.
std::vector<EbkLevel> ebk_level_table(TorusFamily family, int nu1,
                                      int nu2_lo, int nu2_hi, double eta,
                                      const EbkOptions& opt = {});

}  // namespace ringtrio
