#include "ringtrio/model.hpp"

#include <numbers>
#include <stdexcept>

#include "ringtrio/potential_core.hpp"

namespace ringtrio {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

bool in_domain(double x, double y) {
    return detail::args_in_domain(detail::sine_args(x, y));
}

double potential(double x, double y) { return detail::potential_t(x, y); }

Vec2 grad_potential(double x, double y) {
    double gx, gy;
    detail::potential_grad_t(x, y, gx, gy);
    return {gx, gy};
}

Mat2 hessian_potential(double x, double y) {
    double hxx, hxy, hyy;
    detail::potential_hess_t(x, y, hxx, hxy, hyy);
    Mat2 h;
    h << hxx, hxy, hxy, hyy;
    return h;
}

std::array<Vec2, 3> triangle_vertices() {
    return {Vec2(-kTriangleHalfWidth, kTriangleYMin),
            Vec2(kTriangleHalfWidth, kTriangleYMin), Vec2(0.0, kTriangleYMax)};
}

double triangle_area() {
    // equilateral, side 2 pi/sqrt(3)
    const double side = 2.0 * kPi / std::numbers::sqrt3;
    return std::numbers::sqrt3 / 4.0 * side * side;
}

std::array<double, 3> jacobi_from_angles(double th1, double th2, double th3) {
    const double x = ((th1 + th2) / 2.0 - th3 + kPi) / std::numbers::sqrt3;
    const double y = (th2 - th1) / 2.0 - kPi / 3.0;
    const double z = (th1 + th2 + th3) / 3.0 - 2.0 * kPi / 3.0;
    return {x, y, z};
}

std::array<double, 3> angles_from_jacobi(double x, double y, double z) {
    const double s = 3.0 * z + 2.0 * kPi;  // th1 + th2 + th3
    const double sum12 = 2.0 / 3.0 * (std::numbers::sqrt3 * x - kPi + s);
    const double diff21 = 2.0 * y + 2.0 * kPi / 3.0;  // th2 - th1
    const double th1 = (sum12 - diff21) / 2.0;
    return {th1, th1 + diff21, s - sum12};
}

SymmetryOp symmetry_op(SymKind kind) {
    // R = counterclockwise rotation by 2 pi/3 (matches the cyclic particle
    // relabeling), S = reflection x -> -x.
    Mat2 R, S;
    R << -0.5, -std::numbers::sqrt3 / 2.0, std::numbers::sqrt3 / 2.0, -0.5;
    S << -1.0, 0.0, 0.0, 1.0;
    switch (kind) {
        case SymKind::Identity: return {kind, Mat2::Identity()};
        case SymKind::R: return {kind, R};
        case SymKind::Rinv: return {kind, R.transpose()};
        case SymKind::S: return {kind, S};
        case SymKind::SR: return {kind, S * R};
        case SymKind::SRinv: return {kind, S * R.transpose()};
    }
    throw std::invalid_argument("symmetry_op: bad kind");
}

std::array<SymmetryOp, 6> all_symmetry_ops() {
    return {symmetry_op(SymKind::Identity), symmetry_op(SymKind::R),
            symmetry_op(SymKind::Rinv),     symmetry_op(SymKind::S),
            symmetry_op(SymKind::SR),       symmetry_op(SymKind::SRinv)};
}

PhasePoint apply_symmetry(const SymmetryOp& op, const PhasePoint& p) {
    const Vec2 r = op.matrix * p.pos();
    const Vec2 q = op.matrix * p.mom();
    return {r.x(), r.y(), q.x(), q.y()};
}

std::string irrep_name(Irrep r) {
    switch (r) {
        case Irrep::A1: return "A1";
        case Irrep::A2: return "A2";
        case Irrep::Ep: return "E+";
        case Irrep::Em: return "E-";
    }
    return "?";
}

std::set<int> allowed_angular_momenta(Irrep r) {
    switch (r) {
        case Irrep::A1:
        case Irrep::A2: return {0};
        case Irrep::Ep: return {2};  // n = -1 mod 3
        case Irrep::Em: return {1};  // n = +1 mod 3
    }
    return {};
}

UnitKind unit_kind_from_string(const std::string& s) {
    if (s == "energy_hz") return UnitKind::EnergyHz;
    if (s == "time_s") return UnitKind::TimeSeconds;
    if (s == "splitting_period_s") return UnitKind::SplittingPeriodSeconds;
    if (s == "action_js") return UnitKind::ActionJs;
    throw std::invalid_argument("unknown unit kind: " + s);
}

double to_physical_units(double value, UnitKind kind, double C6_over_h,
                         double R, double mass) {
    if (!(C6_over_h > 0 && R > 0 && mass > 0))
        throw std::invalid_argument("to_physical_units: constants must be positive");
    constexpr double h_planck = 6.62607015e-34;  // J s
    const double R_m = R * 1e-6;
    const double C6 = C6_over_h * 1e9 * h_planck * 1e-36;  // J m^6
    const double energy_unit_hz = C6_over_h * 1e9 / std::pow(R, 6.0);
    switch (kind) {
        case UnitKind::EnergyHz:
            return value * energy_unit_hz;
        case UnitKind::TimeSeconds:
            return value * std::sqrt(mass * std::pow(R_m, 8.0) / C6);
        case UnitKind::SplittingPeriodSeconds:
            // tunneling period h/(Delta E) for a dimensionless splitting
            return 1.0 / (value * energy_unit_hz);
        case UnitKind::ActionJs:
            return value * std::sqrt(mass * C6) / (R_m * R_m);
    }
    throw std::invalid_argument("to_physical_units: bad kind");
}

}  // namespace ringtrio
