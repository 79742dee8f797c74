// Periodic-orbit families A (median librations), B (unstable arcs) and C
// (rotating loops): quadrature oracle for A, Newton shooting on the section
// return map, pseudo-arclength continuation in energy, and linear stability.
#pragma once

#include <string>
#include <vector>

#include "ringtrio/poincare.hpp"

namespace ringtrio {

enum class Family { A0, A1, A2, B1, B2, B3, Cp, Cm, Unknown };
std::string family_name(Family f);

struct PeriodicOrbit {
    Family family = Family::Unknown;
    double energy = 0;
    double period = 0;
    PhasePoint start;  // on the orbit, at a section crossing
    Trajectory path;   // one period
    Mat4 monodromy;    // tangent map over one period from `start`
    Eigen::Matrix2d transverse;  // section return-map jacobian (trivial pair removed)
    double trace = 0;            // of `transverse`
    bool stable = false;         // |trace| <= 2
    double lyapunov = 0;         // log(max |eigenvalue|)/period, 0 when stable
    double residual = 0;         // |z(T) - z(0)|
    SectionSpec section;
};

struct ShootOptions {
    int max_iterations = 50;
    double tol = 1e-11;        // on the section-coordinate mismatch
    int n_path_samples = 512;  // stored representative path
    int n_return = 1;          // fixed point of the n-th return map
    OdeOptions ode = default_ode_options();
};

// Period of the x = 0 libration by turning-point quadrature (independent of
// the shooting machinery): T = 2 int dy / sqrt(eps - v(0,y)) with Chebyshev
// nodes absorbing the square-root endpoint singularities.
double period_A_quadrature(double eps, int n_nodes = 256);

// Full orbit record for the x = 0 libration built from the quadrature period.
PeriodicOrbit orbit_A_quadrature(double eps, const ShootOptions& opt = {});

// Newton iteration on the Poincare return map, using the monodromy-based
// jacobian.  The guess is projected onto the energy surface by rescaling its
// momentum; the section is chosen by the family hint (y = 0 for A0, which
// lies inside the default section plane; x = 0 otherwise).
PeriodicOrbit find_periodic(const PhasePoint& guess, double eps,
                            Family hint = Family::Unknown,
                            const ShootOptions& opt = {});

// Pseudo-arclength continuation of `seed` across eps_range; returns orbits
// at `steps` evenly spaced energies (the seed energy need not be a grid
// point).  Throws on a continuation stall (arclength step below 1e-6).
std::vector<PeriodicOrbit> continue_family(const PeriodicOrbit& seed,
                                           double eps_min, double eps_max,
                                           int steps,
                                           const ShootOptions& opt = {});

struct StabilityInfo {
    bool stable = false;
    double trace = 0;
    double lyapunov = 0;
};
StabilityInfo stability(const PeriodicOrbit& orbit);

// Geometric family signature of a converged orbit (median libration, arc, or
// rotation sense).
Family detect_family(const Trajectory& path);

// Scans the x = 0, px > 0 section for return-map fixed points at energy eps
// and polishes each with the Newton finder; duplicates are merged.  Finds
// A1, A2, B1..B3 and C+- at moderate energies.
std::vector<PeriodicOrbit> discover_section_orbits(double eps, int grid = 40,
                                                   const ShootOptions& opt = {});

// Low-energy rotating seed for family C (harmonic circular orbit), suitable
// for find_periodic + continuation.
PhasePoint seed_C(double eps, bool anticlockwise = true);

}  // namespace ringtrio
