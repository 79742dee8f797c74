// Model definition: three repulsive bosons on a ring, reduced to a 2D point
// particle in a triangular potential cell.  Working units fix m = R = C6 = 1,
// so H = (px^2 + py^2)/4 + v(x,y), energies are in C6/R^6, times in
// (m R^8/C6)^(1/2), actions in (m C6)^(1/2)/R^2.  The effective Planck
// constant eta = hbar R^2/(m C6)^(1/2) is the only free parameter.
#pragma once

#include <array>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Dense>

namespace ringtrio {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct ModelParams {
    double eta = 0.01;  // dimensionless effective Planck constant
};

struct PhasePoint {
    double x = 0, y = 0, px = 0, py = 0;

    Vec2 pos() const { return {x, y}; }
    Vec2 mom() const { return {px, py}; }
};

// Relative-coordinate potential. The three sine arguments vanish on the edges
// of the fundamental triangle (pairwise collisions); the offset -1/9 places
// the minimum v(0,0) = 0 at the equilateral configuration.
double potential(double x, double y);
Vec2 grad_potential(double x, double y);
Mat2 hessian_potential(double x, double y);

// True when all three sine arguments lie in the guarded interval
// [1e-6, pi - 1e-6]; potential/grad/hessian throw std::domain_error outside.
bool in_domain(double x, double y);

inline double kinetic_energy(const PhasePoint& p) {
    return (p.px * p.px + p.py * p.py) / 4.0;
}
inline double energy(const PhasePoint& p) {
    return kinetic_energy(p) + potential(p.x, p.y);
}

// Fundamental triangle ABC: A = (-pi/sqrt(3), -pi/3), B = (pi/sqrt(3), -pi/3),
// C = (0, 2pi/3).  Equilateral, side 2pi/sqrt(3), centroid at the origin.
constexpr double kTriangleHalfWidth = 1.8137993642342178;   // pi/sqrt(3)
constexpr double kTriangleYMin = -1.0471975511965976;       // -pi/3
constexpr double kTriangleYMax = 2.0943951023931953;        // 2pi/3
std::array<Vec2, 3> triangle_vertices();
double triangle_area();

// Jacobi-style angle coordinates for the three particles on the ring.
std::array<double, 3> jacobi_from_angles(double th1, double th2, double th3);
std::array<double, 3> angles_from_jacobi(double x, double y, double z);

// --- C3v point group -------------------------------------------------------

enum class SymKind { Identity, R, Rinv, S, SR, SRinv };

struct SymmetryOp {
    SymKind kind;
    Mat2 matrix;  // orthogonal action on (x, y); momenta transform alike
};

SymmetryOp symmetry_op(SymKind kind);
std::array<SymmetryOp, 6> all_symmetry_ops();
PhasePoint apply_symmetry(const SymmetryOp& op, const PhasePoint& p);

enum class Irrep { A1, A2, Ep, Em };
std::string irrep_name(Irrep r);

// Residues of the total angular momentum n mod 3 compatible with each irrep.
// Convention: R|psi_E,+-> = +-j |psi_E,+->, j = exp(2 i pi/3), and the cyclic
// relabeling identity psi_n(R r) = psi_n(r) exp(2 i n pi/3).
std::set<int> allowed_angular_momenta(Irrep r);

// --- physical units --------------------------------------------------------

enum class UnitKind { EnergyHz, TimeSeconds, SplittingPeriodSeconds, ActionJs };
UnitKind unit_kind_from_string(const std::string& s);

// C6_over_h in GHz um^6, R in um, mass in kg.
double to_physical_units(double value, UnitKind kind, double C6_over_h,
                         double R, double mass);

}  // namespace ringtrio
